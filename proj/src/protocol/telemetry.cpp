#include "ald/protocol/telemetry.hpp"

#include <array>
#include <charconv>

namespace ald::protocol {

ParseError::ParseError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

namespace {

struct Field {
  std::string_view key;
  int Telemetry::*member;
};

constexpr std::array<Field, 8> kFields{{
    {"pitch", &Telemetry::pitch},
    {"roll", &Telemetry::roll},
    {"yaw", &Telemetry::yaw_deg},
    {"h", &Telemetry::height},
    {"bat", &Telemetry::battery},
    {"templ", &Telemetry::temp_low},
    {"temph", &Telemetry::temp_high},
    {"time", &Telemetry::flight_time},
}};

bool is_trailer(std::string_view rest) {
  for (char c : rest) {
    if (c != '\r' && c != '\n' && c != ' ') return false;
  }
  return true;
}

}  // namespace

Telemetry parse_state(std::string_view packet) {
  Telemetry out;
  std::array<bool, kFields.size()> seen{};
  std::array<std::size_t, kFields.size()> value_at{};

  std::size_t pos = 0;
  while (pos < packet.size()) {
    if (is_trailer(packet.substr(pos))) break;
    const std::size_t pair_start = pos;
    std::size_t end = packet.find(';', pos);
    if (end == std::string_view::npos) end = packet.size();
    const std::string_view pair = packet.substr(pos, end - pos);
    const std::size_t colon = pair.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError("malformed pair (no ':')", pair_start);
    }
    const std::string_view key = pair.substr(0, colon);
    const std::string_view value = pair.substr(colon + 1);
    const std::size_t value_offset = pair_start + colon + 1;

    for (std::size_t i = 0; i < kFields.size(); ++i) {
      if (kFields[i].key != key) continue;
      int parsed = 0;
      const char* first = value.data();
      const char* last = value.data() + value.size();
      auto [ptr, ec] = std::from_chars(first, last, parsed);
      if (value.empty() || ec != std::errc{} || ptr != last) {
        throw ParseError("non-integer value for '" + std::string(key) + "'", value_offset);
      }
      out.*(kFields[i].member) = parsed;
      seen[i] = true;
      value_at[i] = value_offset;
      break;
    }
    pos = end + 1;
  }

  for (std::size_t i = 0; i < kFields.size(); ++i) {
    if (!seen[i]) {
      throw ParseError("missing key '" + std::string(kFields[i].key) + "'", packet.size());
    }
  }
  if (out.battery < 0 || out.battery > 100) throw ParseError("battery outside [0,100]", value_at[4]);
  if (out.temp_low > out.temp_high) throw ParseError("templ > temph", value_at[5]);
  return out;
}

std::string format_state(const Telemetry& t) {
  std::string out;
  for (const auto& field : kFields) {
    out += field.key;
    out += ':';
    out += std::to_string(t.*(field.member));
    out += ';';
  }
  return out;
}

}  // namespace ald::protocol
