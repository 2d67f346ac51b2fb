#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ald/control/controller.hpp"
#include "ald/protocol/telemetry.hpp"

namespace ald::station {

// Session directory layout:
//   manifest.json
//   frames/NNNNNN.ppm
//   telemetry.jsonl   one JSON object per tick: Telemetry fields + tick
//   commands.log      "<tick> <t_ms> <command text>" per line
//   inputs.jsonl      controller inputs per tick, for replay

struct SessionManifest {
  std::string session_id;
  std::string start_time;  // ISO-8601 UTC
  int tick_ms = 50;
  std::size_t frame_count = 0;
  std::vector<std::string> frame_files;  // relative to the session directory
  std::string telemetry_file = "telemetry.jsonl";
  std::string command_file = "commands.log";
  std::string inputs_file = "inputs.jsonl";
  std::uint64_t frames_dropped = 0;
  bool write_failed = false;
  std::string failure;
  control::ControlState initial_state;
  nlohmann::json config = nlohmann::json::object();
};

nlohmann::json to_json(const SessionManifest& m);
SessionManifest manifest_from_json(const nlohmann::json& j);
void write_manifest(const std::filesystem::path& dir, const SessionManifest& m);
SessionManifest read_manifest(const std::filesystem::path& dir);

nlohmann::json to_json(const control::ControlState& s);
control::ControlState control_state_from_json(const nlohmann::json& j);

struct TelemetryRecord {
  std::uint64_t tick = 0;
  protocol::Telemetry telemetry;
  friend bool operator==(const TelemetryRecord&, const TelemetryRecord&) = default;
};

std::string telemetry_line(const TelemetryRecord& r);
/// Throws std::runtime_error on a malformed or incomplete line.
TelemetryRecord parse_telemetry_line(std::string_view line);

struct CommandRecord {
  std::uint64_t tick = 0;
  std::int64_t t_ms = 0;
  std::string text;
  friend bool operator==(const CommandRecord&, const CommandRecord&) = default;
};

std::string command_line(const CommandRecord& r);
CommandRecord parse_command_line(std::string_view line);

/// Held keys as {"RIGHT","LEFT","UP","DOWN","w","s","d","a"} booleans.
nlohmann::json keys_to_json(const control::KeyState& keys);
control::KeyState keys_from_json(const nlohmann::json& j);

struct TickInput {
  std::uint64_t tick = 0;
  control::KeyState keys;
  control::Perception perception;
};

std::string input_line(const TickInput& in);
TickInput parse_input_line(std::string_view line);

std::vector<TelemetryRecord> read_telemetry_log(const std::filesystem::path& file);
std::vector<CommandRecord> read_command_log(const std::filesystem::path& file);
std::vector<TickInput> read_input_log(const std::filesystem::path& file);

/// Protocol texts a controller tick emits, in send order: the safety verb,
/// stream verbs from side effects, then the rc line.
std::vector<std::string> commands_for(const control::TickResult& result);

std::string utc_timestamp();

}  // namespace ald::station
