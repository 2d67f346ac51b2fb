#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "ald/protocol/rc_command.hpp"

namespace ald::protocol {

enum class Verb { Command, Takeoff, Land, Emergency, StreamOn, StreamOff, BatteryQuery };

std::string_view encode_simple(Verb verb) noexcept;
std::optional<Verb> parse_verb(std::string_view text) noexcept;

using ParsedCommand = std::variant<Verb, RcCommand>;

/// Parses any datagram the drone accepts. Returns nullopt for text outside
/// the grammar (the drone answers those with "error").
std::optional<ParsedCommand> parse_command(std::string_view text) noexcept;

struct CommandOutcome {
  // value: a query reply carrying data ("battery?" -> "87").
  enum class Kind { Ok, Error, Timeout, Value };
  Kind kind = Kind::Timeout;
  std::string raw;

  bool ok() const noexcept { return kind == Kind::Ok; }

  static CommandOutcome timeout() { return {Kind::Timeout, {}}; }
  /// Classifies a response to `sent`.
  static CommandOutcome classify(std::string_view sent, std::string_view response);
};

std::string_view to_string(CommandOutcome::Kind kind) noexcept;

/// Datagrams above this size are rejected on both sides.
inline constexpr std::size_t kMaxDatagram = 1024;

}  // namespace ald::protocol
