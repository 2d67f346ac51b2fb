#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ald/vision/frame.hpp"

namespace ald::station {

/// 8-bit RGB PNG in memory.
std::vector<std::uint8_t> encode_png(const vision::Frame& frame);

std::string base64_encode(const std::vector<std::uint8_t>& bytes);

}  // namespace ald::station
