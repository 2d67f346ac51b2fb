#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ald/control/controller.hpp"

namespace ald::station {

struct TraceLine {
  std::uint64_t tick = 0;
  std::string text;
  friend bool operator==(const TraceLine&, const TraceLine&) = default;
};

/// Feeds the recorded per-tick inputs through control_tick from the recorded
/// initial state and returns every command the controller emits.
std::vector<TraceLine> replay_session(const std::filesystem::path& dir,
                                      const control::ControlParams& params = {});

/// The commands the live controller logged, read back from commands.log.
std::vector<TraceLine> recorded_trace(const std::filesystem::path& dir);

std::string format_trace(const std::vector<TraceLine>& trace);

}  // namespace ald::station
