#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ald::protocol {

inline constexpr int kRcMin = -100;
inline constexpr int kRcMax = 100;

/// Four-axis speed setpoint, each axis a motor-speed percentage in [-100, 100].
struct RcCommand {
  int right = 0;
  int forward = 0;
  int upward = 0;
  int yaw = 0;

  friend bool operator==(const RcCommand&, const RcCommand&) = default;
};

/// Thrown when an rc field is outside [-100, 100]. field() names the axis.
class RangeError : public std::out_of_range {
 public:
  RangeError(std::string field, int value);
  const std::string& field() const noexcept { return field_; }
  int value() const noexcept { return value_; }

 private:
  std::string field_;
  int value_;
};

void validate(const RcCommand& cmd);

/// "rc <right> <forward> <upward> <yaw>", no trailing newline.
std::string encode_rc(const RcCommand& cmd);

/// Inverse of encode_rc. Throws std::invalid_argument on bad grammar and
/// RangeError on out-of-range axes.
RcCommand parse_rc(std::string_view text);

bool is_rc_text(std::string_view text) noexcept;

}  // namespace ald::protocol
