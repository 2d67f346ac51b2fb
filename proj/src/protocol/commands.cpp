#include "ald/protocol/commands.hpp"

#include <array>

namespace ald::protocol {

namespace {

constexpr std::array<std::pair<Verb, std::string_view>, 7> kVerbs{{
    {Verb::Command, "command"},
    {Verb::Takeoff, "takeoff"},
    {Verb::Land, "land"},
    {Verb::Emergency, "emergency"},
    {Verb::StreamOn, "streamon"},
    {Verb::StreamOff, "streamoff"},
    {Verb::BatteryQuery, "battery?"},
}};

}  // namespace

std::string_view encode_simple(Verb verb) noexcept {
  for (const auto& [v, text] : kVerbs) {
    if (v == verb) return text;
  }
  return {};
}

std::optional<Verb> parse_verb(std::string_view text) noexcept {
  for (const auto& [v, spelling] : kVerbs) {
    if (spelling == text) return v;
  }
  return std::nullopt;
}

std::optional<ParsedCommand> parse_command(std::string_view text) noexcept {
  if (auto verb = parse_verb(text)) return ParsedCommand{*verb};
  if (is_rc_text(text)) {
    try {
      return ParsedCommand{parse_rc(text)};
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

CommandOutcome CommandOutcome::classify(std::string_view sent, std::string_view response) {
  if (response == "ok") return {Kind::Ok, std::string(response)};
  const bool query = !sent.empty() && sent.back() == '?';
  if (query && response.substr(0, 5) != "error") return {Kind::Value, std::string(response)};
  return {Kind::Error, std::string(response)};
}

std::string_view to_string(CommandOutcome::Kind kind) noexcept {
  switch (kind) {
    case CommandOutcome::Kind::Ok: return "ok";
    case CommandOutcome::Kind::Error: return "error";
    case CommandOutcome::Kind::Timeout: return "timeout";
    case CommandOutcome::Kind::Value: return "value";
  }
  return "unknown";
}

}  // namespace ald::protocol
