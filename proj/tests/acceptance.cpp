// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "ald/control/controller.hpp"
#include "ald/protocol/client.hpp"
#include "ald/protocol/commands.hpp"
#include "ald/protocol/rc_command.hpp"
#include "ald/protocol/telemetry.hpp"
#include "ald/sim/camera.hpp"
#include "ald/sim/server.hpp"
#include "ald/sim/sim_core.hpp"
#include "ald/station/closed_loop.hpp"
#include "ald/station/replay.hpp"
#include "ald/station/session.hpp"
#include "ald/vision/blob_detector.hpp"
#include "support.hpp"

using namespace ald;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1 -------------------------------------------------------------------------

// Hand evaluation for an 840x720 image with integer cx and prev. Let
// x = cx - 420. Then 0.4x + 0.4(x - p) = 2(2x - p)/5 exactly; that exceeds the
// clip of 100 iff |2(2x - p)| > 500, and divided by 1.5 it is 4(2x - p)/15,
// whose int() is C++ integer division. Clipped values give 100/1.5 -> 66.
protocol::RcCommand oracle(std::int64_t area, int cx, int cy, int prev) {
  protocol::RcCommand c;
  if (cx > 0) {
    const int raw5 = 2 * (2 * (cx - 420) - prev);
    c.yaw = raw5 > 500 ? 66 : raw5 < -500 ? -66 : (2 * raw5) / 15;
  }
  if (area > 0 && area < 2800) c.forward = 30;
  if (area > 3000) c.forward = -30;
  if (cy > 0 && cy < 240) c.upward = 30;  // 720 / 3
  if (cy > 360) c.upward = -30;           // 720 / 2
  return c;
}

Outcome control_law_oracle() {
  const auto start = Clock::now();
  const std::vector<std::int64_t> areas{0, 1, 2799, 2800, 3000, 3001};
  // cx 233 with prev -344 gives a quotient of exactly -8 that binary floating
  // point evaluates as -7.999...
  const std::vector<int> cxs{0, 1, 420, 840, 233, 232, 421, 419, 300, 545};
  const std::vector<int> cys{0, 239, 240, 360, 361, 720};
  const std::vector<int> prevs{0, -344, 210, -210, 420, -420, 17};
  std::size_t n = 0, bad = 0, neg = 0, pos = 0;
  std::string first_bad;
  for (auto area : areas)
    for (int cx : cxs)
      for (int cy : cys)
        for (int prev : prevs) {
          control::ControlState s;
          s.prev_offset = prev;
          const auto got = control::follow_step({area, cx, cy}, s).command;
          const auto want = oracle(area, cx, cy, prev);
          ++n;
          if (want.yaw < 0) ++neg;
          if (want.yaw > 0) ++pos;
          if (!(got == want)) {
            if (!bad++) {
              first_bad = fmt("(%lld,%d,%d,%d) got %s want %s", (long long)area, cx, cy, prev,
                              protocol::encode_rc(got).c_str(), protocol::encode_rc(want).c_str());
            }
          }
        }
  const double t = seconds_since(start);
  const bool ok = bad == 0 && n >= 500 && neg > 0 && pos > 0 && t < 1.0;
  return {ok, fmt("%zu tuples, %zu mismatches, yaw<0:%zu yaw>0:%zu, %.3f s %s", n, bad, neg, pos, t,
                  first_bad.c_str())};
}

// 2, 3 ----------------------------------------------------------------------

sim::SimWorld scenario(std::uint64_t seed, sim::NoiseModel noise) {
  auto w = sim::make_world(seed, noise);
  sim::takeoff(w);  // camera at 0.8 m
  w.target.position = {2.5, -0.5, 1.1};
  // Heating at 0.5/s from the default 72 reaches the 95 shutdown after 46 s
  // of flight; start cooler so a 60 s run stays airborne.
  w.temperature = 60.0;
  return w;
}

control::KeyState press(std::string keys) {
  control::KeyState k;
  k.pressed = std::move(keys);
  return k;
}

bool in_deadband(const vision::Observation& o) {
  return o.area >= 2800 && o.area <= 3000 && std::abs(o.cx - 420) <= 25 && o.cy >= 240 && o.cy <= 360;
}

struct ConvergenceRun {
  long entered = -1;  // first tick of a 100-tick run inside the deadband
  std::vector<std::string> trace;
  vision::Observation last;
};

ConvergenceRun run_convergence(std::uint64_t seed) {
  station::ClosedLoop loop(scenario(seed, sim::NoiseModel::off()));
  ConvergenceRun r;
  long streak_start = -1;
  for (long i = 0; i < 700; ++i) {
    const auto t = loop.tick(i == 0 ? press("k") : control::KeyState{});
    const auto obs = t.perception.eyes.value_or(vision::Observation{});
    r.last = obs;
    for (auto& c : station::commands_for(t.result)) r.trace.push_back(c);
    if (in_deadband(obs)) {
      if (streak_start < 0) streak_start = i;
      if (i - streak_start + 1 >= 100 && r.entered < 0) r.entered = streak_start;
    } else {
      streak_start = -1;
    }
  }
  return r;
}

Outcome closed_loop_convergence() {
  const auto a = run_convergence(7);
  const auto b = run_convergence(7);
  const bool deterministic = a.trace == b.trace;
  const bool ok = a.entered >= 0 && a.entered < 600 && deterministic;
  return {ok, fmt("entered deadband at tick %ld, final obs (%lld,%d,%d), deterministic=%d", a.entered,
                  (long long)a.last.area, a.last.cx, a.last.cy, int(deterministic))};
}

Outcome noise_robustness() {
  std::string detail;
  bool ok = true;
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    station::ClosedLoop loop(scenario(seed, sim::NoiseModel::with_horizontal(0.02)));
    const long ticks = 1200;  // 60 s
    long inside = 0;
    for (long i = 0; i < ticks; ++i) {
      const auto t = loop.tick(i == 0 ? press("k") : control::KeyState{});
      const auto obs = t.perception.eyes.value_or(vision::Observation{});
      if (obs.cy >= 240 && obs.cy <= 360) ++inside;
    }
    const double frac = double(inside) / ticks;
    ok = ok && frac >= 0.95;
    detail += fmt("seed %d: %.1f%% ", int(seed), 100.0 * frac);
  }
  return {ok, detail + "(vertical std 0.04 m/s)"};
}

// 4 -------------------------------------------------------------------------

Outcome protocol_conformance() {
  const auto start = Clock::now();
  std::mt19937 rng(42);
  std::uniform_int_distribution<int> axis(-100, 100);
  std::size_t rc_bad = 0;
  for (int i = 0; i < 10000; ++i) {
    const protocol::RcCommand c{axis(rng), axis(rng), axis(rng), axis(rng)};
    const auto text = protocol::encode_rc(c);
    const auto parsed = protocol::parse_command(text);
    if (!(protocol::parse_rc(text) == c) || !parsed || !(std::get<protocol::RcCommand>(*parsed) == c)) {
      ++rc_bad;
    }
  }

  // State packets, parsed directly and also through a live listener.
  std::uniform_int_distribution<int> any(-360, 360), pct(0, 100);
  std::vector<protocol::Telemetry> packets;
  std::size_t state_bad = 0;
  for (int i = 0; i < 1000; ++i) {
    protocol::Telemetry t{any(rng), any(rng), any(rng), pct(rng) * 3, pct(rng), 0, 0, i};
    t.temp_low = 60 + pct(rng) / 4;
    t.temp_high = t.temp_low + 2;
    packets.push_back(t);
    if (!(protocol::parse_state(protocol::format_state(t)) == t)) ++state_bad;
  }

  std::size_t pair_bad = 0;
  std::size_t rc_seen = 0;
  std::size_t live_state = 0;
  {
    testing_support::FakeDrone drone([](const std::string& s) -> std::optional<std::string> {
      if (protocol::is_rc_text(s)) return std::nullopt;
      if (s.size() > 2 && s.front() == 'q' && s.back() == '?') return s.substr(1, s.size() - 2);
      return "error";
    });
    protocol::ClientOptions o;
    o.endpoint = {"127.0.0.1", drone.port(), testing_support::free_udp_port(), 1};
    o.timeout = std::chrono::milliseconds(1000);
    protocol::Client client(o);

    // Ten unanswered rc datagrams between every query: each reply must still
    // belong to the query it follows.
    std::uniform_int_distribution<int> axis2(-100, 100);
    for (int q = 0; q < 1000; ++q) {
      for (int k = 0; k < 10; ++k) client.send_rc({axis2(rng), axis2(rng), axis2(rng), axis2(rng)});
      const auto reply = client.send_command("q" + std::to_string(q) + "?");
      if (!reply || reply->raw != std::to_string(q)) ++pair_bad;
    }
    for (const auto& s : drone.received()) rc_seen += protocol::is_rc_text(s);

    protocol::UdpSocket sender;
    sender.bind(protocol::Address::any(0));
    const auto to = protocol::Address::resolve("127.0.0.1", client.local_state_port());
    for (std::size_t i = 0; i < packets.size(); ++i) {
      sender.send_to(protocol::format_state(packets[i]), to);
      if (i % 50 == 49) {
        const auto want = i + 1;
        const auto until = Clock::now() + std::chrono::seconds(1);
        while (client.telemetry_count() < want && Clock::now() < until) std::this_thread::yield();
      }
    }
    live_state = client.telemetry_count();
    const auto last = client.latest_telemetry();
    if (!last || !(*last == packets.back()) || client.telemetry_errors() != 0) ++state_bad;
  }

  const double t = seconds_since(start);
  const bool ok = rc_bad == 0 && state_bad == 0 && pair_bad == 0 && rc_seen == 10000 &&
                  live_state == 1000 && t < 5.0;
  return {ok, fmt("rc round-trip mismatches %zu/10000, state mismatches %zu/1000 (live %zu), "
                  "mispaired replies %zu/1000, rc delivered %zu, %.2f s",
                  rc_bad, state_bad, live_state, pair_bad, rc_seen, t)};
}

// 5 -------------------------------------------------------------------------

Outcome detector_oracle() {
  const vision::BlobDetector detector;
  double worst_center = 0, worst_area = 0;
  int cases = 0, misses = 0;
  for (double z : {0.8, 1.0, 1.28, 2.0, 3.0}) {
    for (double k : {-0.3, -0.15, 0.0, 0.15, 0.3}) {
      auto w = sim::make_world(0);
      sim::takeoff(w);
      w.target.position = {z, k * z, 0.8};
      const auto exact = sim::project_target_exact(w);
      const auto obs = vision::best_candidate(detector(sim::render_camera(w)));
      ++cases;
      if (!exact || obs.area == 0) {
        ++misses;
        continue;
      }
      worst_center = std::max({worst_center, std::abs(obs.cx - exact->u), std::abs(obs.cy - exact->v)});
      worst_area = std::max(worst_area, std::abs(obs.area - exact->area()) / exact->area());
    }
  }
  const bool ok = misses == 0 && worst_center <= 4.0 && worst_area <= 0.15;
  return {ok, fmt("%d cases, %d missed, worst center error %.2f px, worst area error %.1f%%", cases,
                  misses, worst_center, 100 * worst_area)};
}

// 6 -------------------------------------------------------------------------

Outcome overheat_lifecycle() {
  std::string detail;
  bool ok = true;

  // Step level: the latch, and motion on the step after it.
  sim::SimCore core(sim::make_world(0));
  core.handle("command");
  ok &= core.handle("takeoff") == std::optional<std::string>("ok");
  core.mutable_world().temperature = 94.0;
  core.handle("rc 0 50 0 0");
  int steps = 0;
  while (!core.world().shutdown && steps < 1000) {
    core.advance(0.01);
    ++steps;
  }
  const auto latched = core.world();
  core.advance(0.01);
  const auto after = core.world();
  const bool still = latched.shutdown && after.shutdown && after.velocity.isZero() &&
                     after.yaw_rate == 0.0 && after.drone.position == latched.drone.position;
  const bool refused = core.handle("takeoff") == std::optional<std::string>("error");
  const auto tele = sim::telemetry_of(after);
  ok &= still && refused && tele.temp_high >= 95 && !after.flying;
  detail += fmt("core: latched after %d steps, still=%d, takeoff refused=%d, temph=%d; ", steps,
                int(still), int(refused), tele.temp_high);

  // Over the wire.
  auto world = sim::make_world(1);
  world.temperature = 94.0;
  const auto state_port = testing_support::free_udp_port();
  sim::ServerOptions so;
  so.command_port = 0;
  so.video_port = 0;
  so.state_port = state_port;
  sim::SimServer server(world, so);
  protocol::ClientOptions co;
  co.endpoint = {"127.0.0.1", server.command_port(), state_port, server.video_port()};
  co.timeout = std::chrono::milliseconds(1000);
  protocol::Client client(co);
  const bool sdk = client.send(protocol::Verb::Command).kind == protocol::CommandOutcome::Kind::Ok;
  const bool up = client.send(protocol::Verb::Takeoff).kind == protocol::CommandOutcome::Kind::Ok;
  client.send_rc({0, 50, 0, 0});
  int temph = 0;
  const auto until = Clock::now() + std::chrono::seconds(6);
  while (Clock::now() < until) {
    if (auto t = client.latest_telemetry()) temph = t->temp_high;
    if (temph >= 95) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  const auto snap1 = server.snapshot();
  std::this_thread::sleep_for(std::chrono::milliseconds(100));
  const auto snap2 = server.snapshot();
  const bool wire_still = snap1->world.shutdown && snap2->steps > snap1->steps &&
                          snap2->world.drone.position == snap1->world.drone.position &&
                          snap2->world.velocity.isZero();
  const auto retry = client.send(protocol::Verb::Takeoff);
  const bool wire_refused = retry.kind == protocol::CommandOutcome::Kind::Error && retry.raw == "error";
  ok &= sdk && up && temph >= 95 && wire_still && wire_refused;
  detail += fmt("server: takeoff=%d, telemetry temph=%d, still=%d, takeoff reply '%s'", int(up), temph,
                int(wire_still), retry.raw.c_str());
  return {ok, detail};
}

// 7 -------------------------------------------------------------------------

std::vector<std::string> lines_of(const std::filesystem::path& file) {
  std::ifstream in(file);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

Outcome recorder_session() {
  testing_support::TempDir dir;
  const auto path = dir / "session";
  station::ClosedLoop loop(scenario(3, sim::NoiseModel::off()));
  const auto m = station::record_session(loop, path, 2.0, press("k"));

  const auto tele_lines = lines_of(path / "telemetry.jsonl");
  const auto cmd_lines = lines_of(path / "commands.log");
  const auto tele = station::read_telemetry_log(path / "telemetry.jsonl");
  const auto cmds = station::read_command_log(path / "commands.log");
  bool lossless = tele.size() == tele_lines.size() && cmds.size() == cmd_lines.size() && !tele.empty();
  for (std::size_t i = 0; lossless && i < tele.size(); ++i) {
    lossless = station::telemetry_line(tele[i]) == tele_lines[i];
  }
  for (std::size_t i = 0; lossless && i < cmds.size(); ++i) {
    lossless = station::command_line(cmds[i]) == cmd_lines[i];
  }
  const auto manifest = station::read_manifest(path);
  bool frames_exist = manifest.frame_files.size() == manifest.frame_count;
  for (const auto& f : manifest.frame_files) frames_exist &= std::filesystem::exists(path / f);

  const auto recorded = station::recorded_trace(path);
  const auto first = station::replay_session(path);
  const auto second = station::replay_session(path);
  std::size_t rc_lines = 0;
  for (const auto& l : first) rc_lines += protocol::is_rc_text(l.text);
  const bool identical = first == second && first == recorded && rc_lines == 40;

  const long frames = static_cast<long>(m.frame_count);
  const bool ok = frames >= 59 && frames <= 61 && !m.write_failed && frames_exist && lossless && identical;
  return {ok, fmt("%ld frames, %zu telemetry lines, %zu command lines, lossless=%d, replay identical=%d "
                  "(%zu rc lines)",
                  frames, tele.size(), cmds.size(), int(lossless), int(identical), rc_lines)};
}

// 8 -------------------------------------------------------------------------

bool consistent(const control::ControlState& s) {
  const int cv = int(s.followme) + int(s.gestures) + int(s.findfaces);
  return cv <= 1 && (cv == 0 || (s.streaming && s.recording));
}

bool owns(char key, const control::ControlState& s) {
  switch (key) {
    case 'g': return s.gestures;
    case 'k': return s.followme;
    case 'l': return s.findfaces;
  }
  return false;
}

// Isolated: nothing else would be switched by the toggle. A mode key is
// isolated when no other CV mode is on and the camera is already on or the
// mode itself is on; r is isolated when streaming and recording agree or a
// CV mode pins them both.
bool isolated(char key, const control::ControlState& s) {
  if (key == 'f') return true;
  if (key == 'r') return s.cv_mode() || s.streaming == s.recording;
  if (s.cv_mode()) return owns(key, s);
  return s.streaming && s.recording;
}

Outcome mode_machine() {
  std::mt19937 rng(8);
  const std::string keys = "gklfrpqe";
  std::uniform_int_distribution<int> len(1, 12), pick(0, int(keys.size()) - 1), count(0, 3);
  std::bernoulli_distribution coin(0.5);
  std::size_t violations = 0, involution_checks = 0, involution_failures = 0;
  for (int seq = 0; seq < 10000; ++seq) {
    control::ControlState s;
    const int n = len(rng);
    for (int step = 0; step < n; ++step) {
      control::KeyState k;
      k.up = coin(rng);
      k.d = coin(rng);
      for (int c = count(rng); c > 0; --c) k.pressed += keys[pick(rng)];
      control::Perception p;
      p.frame_present = coin(rng);
      s = control::control_tick(k, p, s).state;
      if (!consistent(s)) ++violations;

      for (char t : std::string("gklfr")) {
        if (!isolated(t, s)) continue;
        ++involution_checks;
        const auto once = control::apply_toggle(s, t).state;
        const auto twice = control::apply_toggle(once, t).state;
        if (!(twice == s) || !consistent(once)) ++involution_failures;
      }
    }
  }
  const bool ok = violations == 0 && involution_failures == 0 && involution_checks > 0;
  return {ok, fmt("10000 sequences, %zu invariant violations, %zu/%zu isolated toggles not involutive",
                  violations, involution_failures, involution_checks)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"control-law oracle", control_law_oracle},
      {"closed-loop convergence", closed_loop_convergence},
      {"noise robustness", noise_robustness},
      {"protocol conformance", protocol_conformance},
      {"detector oracle", detector_oracle},
      {"overheat lifecycle", overheat_lifecycle},
      {"recorder and replay", recorder_session},
      {"mode machine", mode_machine},
  };
  int failed = 0;
  int n = 0;
  for (const auto& [name, run] : criteria) {
    ++n;
    Outcome o;
    const auto start = Clock::now();
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %d %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str(),
                seconds_since(start));
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
