#include "ald/station/session.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include "ald/protocol/commands.hpp"

namespace ald::station {

using nlohmann::json;

json to_json(const control::ControlState& s) {
  return {{"followme", s.followme},   {"gestures", s.gestures},   {"findfaces", s.findfaces},
          {"streaming", s.streaming}, {"recording", s.recording}, {"prev_offset", s.prev_offset},
          {"terminate", s.terminate}};
}

control::ControlState control_state_from_json(const json& j) {
  control::ControlState s;
  s.followme = j.value("followme", false);
  s.gestures = j.value("gestures", false);
  s.findfaces = j.value("findfaces", false);
  s.streaming = j.value("streaming", false);
  s.recording = j.value("recording", false);
  s.prev_offset = j.value("prev_offset", 0.0);
  s.terminate = j.value("terminate", false);
  return s;
}

json to_json(const SessionManifest& m) {
  return {{"session_id", m.session_id},
          {"start_time", m.start_time},
          {"tick_ms", m.tick_ms},
          {"frame_count", m.frame_count},
          {"frame_files", m.frame_files},
          {"telemetry_file", m.telemetry_file},
          {"command_file", m.command_file},
          {"inputs_file", m.inputs_file},
          {"frames_dropped", m.frames_dropped},
          {"write_failed", m.write_failed},
          {"failure", m.failure},
          {"initial_state", to_json(m.initial_state)},
          {"config", m.config}};
}

SessionManifest manifest_from_json(const json& j) {
  SessionManifest m;
  m.session_id = j.at("session_id").get<std::string>();
  m.start_time = j.at("start_time").get<std::string>();
  m.tick_ms = j.at("tick_ms").get<int>();
  m.frame_count = j.at("frame_count").get<std::size_t>();
  m.frame_files = j.at("frame_files").get<std::vector<std::string>>();
  m.telemetry_file = j.at("telemetry_file").get<std::string>();
  m.command_file = j.at("command_file").get<std::string>();
  m.inputs_file = j.value("inputs_file", std::string("inputs.jsonl"));
  m.frames_dropped = j.value("frames_dropped", std::uint64_t{0});
  m.write_failed = j.value("write_failed", false);
  m.failure = j.value("failure", std::string());
  if (j.contains("initial_state")) m.initial_state = control_state_from_json(j["initial_state"]);
  m.config = j.value("config", json::object());
  if (m.frame_count != m.frame_files.size()) {
    throw std::runtime_error("manifest frame_count does not match frame_files");
  }
  return m;
}

void write_manifest(const std::filesystem::path& dir, const SessionManifest& m) {
  const auto tmp = dir / "manifest.json.tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
    out << to_json(m).dump(2) << '\n';
    if (!out) throw std::runtime_error("manifest write failed in " + dir.string());
  }
  std::filesystem::rename(tmp, dir / "manifest.json");
}

SessionManifest read_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw std::runtime_error("no manifest.json in " + dir.string());
  return manifest_from_json(json::parse(in));
}

std::string telemetry_line(const TelemetryRecord& r) {
  const auto& t = r.telemetry;
  return json{{"tick", r.tick},         {"pitch", t.pitch},     {"roll", t.roll},
              {"yaw", t.yaw_deg},       {"h", t.height},        {"bat", t.battery},
              {"templ", t.temp_low},    {"temph", t.temp_high}, {"time", t.flight_time}}
      .dump();
}

TelemetryRecord parse_telemetry_line(std::string_view line) {
  try {
    const auto j = json::parse(line);
    TelemetryRecord r;
    r.tick = j.at("tick").get<std::uint64_t>();
    auto& t = r.telemetry;
    t.pitch = j.at("pitch").get<int>();
    t.roll = j.at("roll").get<int>();
    t.yaw_deg = j.at("yaw").get<int>();
    t.height = j.at("h").get<int>();
    t.battery = j.at("bat").get<int>();
    t.temp_low = j.at("templ").get<int>();
    t.temp_high = j.at("temph").get<int>();
    t.flight_time = j.at("time").get<int>();
    return r;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("bad telemetry line: ") + e.what());
  }
}

std::string command_line(const CommandRecord& r) {
  return std::to_string(r.tick) + ' ' + std::to_string(r.t_ms) + ' ' + r.text;
}

CommandRecord parse_command_line(std::string_view line) {
  CommandRecord r;
  const char* p = line.data();
  const char* end = line.data() + line.size();
  auto [p1, e1] = std::from_chars(p, end, r.tick);
  if (e1 != std::errc{} || p1 == end || *p1 != ' ') throw std::runtime_error("bad command line");
  auto [p2, e2] = std::from_chars(p1 + 1, end, r.t_ms);
  if (e2 != std::errc{} || p2 == end || *p2 != ' ') throw std::runtime_error("bad command line");
  r.text.assign(p2 + 1, end);
  return r;
}

json keys_to_json(const control::KeyState& k) {
  return {{"RIGHT", k.right}, {"LEFT", k.left}, {"UP", k.up}, {"DOWN", k.down},
          {"w", k.w},         {"s", k.s},       {"d", k.d},   {"a", k.a}};
}

control::KeyState keys_from_json(const json& j) {
  control::KeyState k;
  k.right = j.value("RIGHT", false);
  k.left = j.value("LEFT", false);
  k.up = j.value("UP", false);
  k.down = j.value("DOWN", false);
  k.w = j.value("w", false);
  k.s = j.value("s", false);
  k.d = j.value("d", false);
  k.a = j.value("a", false);
  return k;
}

std::string input_line(const TickInput& in) {
  const auto& p = in.perception;
  json perception = {{"frame", p.frame_present}, {"faces", p.faces}};
  perception["eyes"] = p.eyes ? json::array({p.eyes->area, p.eyes->cx, p.eyes->cy}) : json(nullptr);
  perception["gesture"] = p.gesture ? json(p.gesture->text) : json(nullptr);
  return json{{"tick", in.tick},
              {"keys", keys_to_json(in.keys)},
              {"pressed", in.keys.pressed},
              {"perception", perception}}
      .dump();
}

TickInput parse_input_line(std::string_view line) {
  try {
    const auto j = json::parse(line);
    TickInput in;
    in.tick = j.at("tick").get<std::uint64_t>();
    in.keys = keys_from_json(j.at("keys"));
    in.keys.pressed = j.value("pressed", std::string());
    const auto& p = j.at("perception");
    in.perception.frame_present = p.value("frame", false);
    in.perception.faces = p.value("faces", 0);
    if (p.contains("eyes") && !p["eyes"].is_null()) {
      const auto& e = p["eyes"];
      in.perception.eyes =
          vision::Observation{e.at(0).get<std::int64_t>(), e.at(1).get<int>(), e.at(2).get<int>()};
    }
    if (p.contains("gesture") && !p["gesture"].is_null()) {
      in.perception.gesture = control::GestureLabel::from_text(p["gesture"].get<std::string>());
    }
    return in;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("bad input line: ") + e.what());
  }
}

namespace {

template <class Parse>
auto read_lines(const std::filesystem::path& file, Parse parse) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::vector<decltype(parse(std::string_view{}))> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(parse(line));
  }
  return out;
}

}  // namespace

std::vector<TelemetryRecord> read_telemetry_log(const std::filesystem::path& file) {
  return read_lines(file, parse_telemetry_line);
}

std::vector<CommandRecord> read_command_log(const std::filesystem::path& file) {
  return read_lines(file, parse_command_line);
}

std::vector<TickInput> read_input_log(const std::filesystem::path& file) {
  return read_lines(file, parse_input_line);
}

std::vector<std::string> commands_for(const control::TickResult& result) {
  std::vector<std::string> out;
  if (result.safety) out.emplace_back(control::to_string(*result.safety));
  for (auto effect : result.effects) {
    if (effect == control::SideEffect::StreamOn) out.emplace_back(protocol::encode_simple(protocol::Verb::StreamOn));
    if (effect == control::SideEffect::StreamOff) out.emplace_back(protocol::encode_simple(protocol::Verb::StreamOff));
  }
  out.push_back(protocol::encode_rc(result.command));
  return out;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  ::gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace ald::station
