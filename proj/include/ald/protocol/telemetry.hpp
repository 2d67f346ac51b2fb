#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ald::protocol {

/// Drone state as carried by the periodic `key:value;` state packet.
/// Temperatures are in whatever unit the drone reports; no conversion.
struct Telemetry {
  int pitch = 0;        // deg
  int roll = 0;         // deg
  int yaw_deg = 0;      // deg
  int height = 0;       // cm
  int battery = 0;      // percent
  int temp_low = 0;
  int temp_high = 0;
  int flight_time = 0;  // s

  friend bool operator==(const Telemetry&, const Telemetry&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Parses a state packet. Keys: pitch roll yaw h bat templ temph time; all
/// required. Unknown keys are skipped without inspecting their values.
Telemetry parse_state(std::string_view packet);

/// Emits the packet in canonical key order, each pair terminated by ';'.
std::string format_state(const Telemetry& t);

}  // namespace ald::protocol
