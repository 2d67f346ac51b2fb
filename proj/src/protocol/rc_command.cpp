#include "ald/protocol/rc_command.hpp"

#include <array>
#include <charconv>

namespace ald::protocol {

RangeError::RangeError(std::string field, int value)
    : std::out_of_range("rc field '" + field + "' out of range [-100, 100]: " +
                        std::to_string(value)),
      field_(std::move(field)),
      value_(value) {}

void validate(const RcCommand& cmd) {
  const std::array<std::pair<const char*, int>, 4> axes{{
      {"right", cmd.right},
      {"forward", cmd.forward},
      {"upward", cmd.upward},
      {"yaw", cmd.yaw},
  }};
  for (const auto& [name, value] : axes) {
    if (value < kRcMin || value > kRcMax) throw RangeError(name, value);
  }
}

std::string encode_rc(const RcCommand& cmd) {
  validate(cmd);
  std::string out = "rc ";
  out += std::to_string(cmd.right);
  out += ' ';
  out += std::to_string(cmd.forward);
  out += ' ';
  out += std::to_string(cmd.upward);
  out += ' ';
  out += std::to_string(cmd.yaw);
  return out;
}

bool is_rc_text(std::string_view text) noexcept {
  return text.size() >= 3 && text.substr(0, 3) == "rc ";
}

RcCommand parse_rc(std::string_view text) {
  if (!is_rc_text(text)) throw std::invalid_argument("not an rc command");
  std::array<int, 4> values{};
  std::size_t pos = 3;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (pos >= text.size()) throw std::invalid_argument("rc command: missing field");
    const char* begin = text.data() + pos;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, values[i]);
    if (ec != std::errc{} || ptr == begin) {
      throw std::invalid_argument("rc command: non-integer field");
    }
    pos = static_cast<std::size_t>(ptr - text.data());
    if (i + 1 < values.size()) {
      if (pos >= text.size() || text[pos] != ' ') {
        throw std::invalid_argument("rc command: expected single space");
      }
      ++pos;
    }
  }
  if (pos != text.size()) throw std::invalid_argument("rc command: trailing data");
  RcCommand cmd{values[0], values[1], values[2], values[3]};
  validate(cmd);
  return cmd;
}

}  // namespace ald::protocol
