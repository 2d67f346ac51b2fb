#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "ald/vision/frame.hpp"

namespace ald::vision {

/// Binary PPM (P6, maxval 255).
std::string encode_ppm(const Frame& frame);
Frame decode_ppm(std::string_view bytes);

void write_ppm(const std::filesystem::path& path, const Frame& frame);
Frame read_ppm(const std::filesystem::path& path);

}  // namespace ald::vision
