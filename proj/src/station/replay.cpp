#include "ald/station/replay.hpp"

#include "ald/station/session.hpp"

namespace ald::station {

std::vector<TraceLine> replay_session(const std::filesystem::path& dir,
                                      const control::ControlParams& params) {
  const auto manifest = read_manifest(dir);
  control::ControlState state = manifest.initial_state;
  std::vector<TraceLine> trace;
  for (const auto& input : read_input_log(dir / manifest.inputs_file)) {
    const auto result = control::control_tick(input.keys, input.perception, state, params);
    state = result.state;
    for (auto& text : commands_for(result)) trace.push_back({input.tick, std::move(text)});
  }
  return trace;
}

std::vector<TraceLine> recorded_trace(const std::filesystem::path& dir) {
  const auto manifest = read_manifest(dir);
  std::vector<TraceLine> trace;
  for (auto& record : read_command_log(dir / manifest.command_file)) {
    trace.push_back({record.tick, std::move(record.text)});
  }
  return trace;
}

std::string format_trace(const std::vector<TraceLine>& trace) {
  std::string out;
  for (const auto& line : trace) {
    out += std::to_string(line.tick);
    out += ' ';
    out += line.text;
    out += '\n';
  }
  return out;
}

}  // namespace ald::station
