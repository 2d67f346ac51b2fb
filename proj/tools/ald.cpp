// ald: simulator, live controller, session replay and protocol checks.

#include <CLI11.hpp>
#include <atomic>
#include <csignal>
#include <cstdio>
#include <iostream>
#include <thread>

#include "ald/sim/camera.hpp"
#include "ald/sim/server.hpp"
#include "ald/station/closed_loop.hpp"
#include "ald/station/conformance.hpp"
#include "ald/station/flight_loop.hpp"
#include "ald/station/replay.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

struct Ports {
  std::uint16_t command = 8889, state = 8890, video = 11111;
};

Ports parse_ports(const std::string& text) {
  Ports p;
  unsigned a = 0, b = 0, c = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%u:%u:%u%c", &a, &b, &c, &tail) != 3 || a > 65535 || b > 65535 ||
      c > 65535) {
    throw std::invalid_argument("--ports expects CMD:STATE:VIDEO");
  }
  p.command = static_cast<std::uint16_t>(a);
  p.state = static_cast<std::uint16_t>(b);
  p.video = static_cast<std::uint16_t>(c);
  return p;
}

ald::sim::SimWorld build_world(std::uint64_t seed, double noise, const std::string& target, double lag) {
  ald::sim::SimParams params;
  params.limits.lag_tau = lag;
  auto world = ald::sim::make_world(seed, ald::sim::NoiseModel::with_horizontal(noise), params);
  auto trajectory = std::make_shared<const ald::sim::Trajectory>(ald::sim::parse_trajectory(target));
  world.trajectory = trajectory;
  world.target.position = ald::sim::evaluate(*trajectory, 0.0);
  return world;
}

int run_sim(std::uint64_t seed, double noise, const std::string& target, const std::string& ports,
            double duration, double lag) {
  const Ports p = parse_ports(ports);
  ald::sim::ServerOptions so;
  so.command_port = p.command;
  so.state_port = p.state;
  so.video_port = p.video;
  ald::sim::SimServer server(build_world(seed, noise, target, lag), so);
  std::cout << "sim listening: command udp " << server.command_port() << ", state udp -> "
            << p.state << ", video tcp " << server.video_port() << std::endl;
  const auto start = std::chrono::steady_clock::now();
  while (!g_stop) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    if (duration > 0 &&
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() >= duration) {
      break;
    }
  }
  server.stop();
  const auto snap = server.snapshot();
  const auto& w = snap->world;
  std::printf("final: t=%.2f pos=(%.3f, %.3f, %.3f) heading=%.3f battery=%.1f temp=%.1f%s\n", w.time,
              w.drone.position.x(), w.drone.position.y(), w.drone.position.z(), w.drone.heading,
              w.battery, w.temperature, w.shutdown ? " shutdown" : "");
  return 0;
}

int run_replay(const std::string& dir, bool check) {
  const auto trace = ald::station::replay_session(dir);
  std::cout << ald::station::format_trace(trace);
  if (!check) return 0;
  const auto recorded = ald::station::recorded_trace(dir);
  if (recorded == trace) {
    std::cerr << "replay matches the recorded commands (" << trace.size() << " lines)\n";
    return 0;
  }
  std::size_t i = 0;
  while (i < trace.size() && i < recorded.size() && trace[i] == recorded[i]) ++i;
  std::cerr << "replay diverges at line " << i + 1 << '\n';
  return 1;
}

int run_conformance(const std::string& endpoint, bool flight, int timeout_ms) {
  ald::station::ConformanceOptions options;
  options.endpoint = ald::protocol::Endpoint::parse(endpoint);
  options.timeout = std::chrono::milliseconds(timeout_ms);
  options.flight = flight;
  const auto results = ald::station::run_conformance(options);
  bool all = true;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    all = all && r.passed;
  }
  return all ? 0 : 1;
}

int run_demo(std::uint64_t seed, double noise, const std::string& target, double seconds,
             const std::string& record) {
  auto world = build_world(seed, noise, target, 0.0);
  ald::sim::takeoff(world);
  ald::station::ClosedLoop loop(std::move(world));
  ald::control::KeyState follow;
  follow.pressed = "k";
  if (!record.empty()) {
    const auto m = ald::station::record_session(loop, record, seconds, follow);
    std::cout << "recorded " << m.frame_count << " frames to " << record << '\n';
  } else {
    const auto ticks = static_cast<int>(seconds / loop.options().params.tick);
    for (int i = 0; i < ticks; ++i) {
      const auto r = loop.tick(i == 0 ? follow : ald::control::KeyState{});
      if (i % 20 == 19) {
        const auto eyes = r.perception.eyes.value_or(ald::vision::Observation{});
        std::printf("t=%5.2f area=%5lld cx=%4d cy=%4d rc=%s\n", r.t, static_cast<long long>(eyes.area),
                    eyes.cx, eyes.cy, ald::protocol::encode_rc(r.result.command).c_str());
      }
    }
  }
  const auto& p = loop.world().drone.position;
  std::printf("final drone position (%.3f, %.3f, %.3f)\n", p.x(), p.y(), p.z());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ald: automated logging drone ground control"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  double noise = 0.0, duration = 0.0, lag = 0.0;
  std::string target = "static:2,0,0.8";
  std::string ports = "8889:8890:11111";
  auto* sim = app.add_subcommand("sim", "Run the simulated drone on UDP/TCP");
  sim->add_option("--seed", seed, "RNG seed");
  sim->add_option("--noise", noise, "Horizontal velocity noise std in m/s (vertical is twice this)");
  sim->add_option("--target", target, "static:x,y,z | orbit:r,period[,cx,cy,cz] | waypoints:FILE");
  sim->add_option("--ports", ports, "CMD:STATE:VIDEO (0 picks a free command/video port)");
  sim->add_option("--duration", duration, "Seconds to run, 0 until interrupted");
  sim->add_option("--lag", lag, "Velocity lag time constant in s (0 disables)");

  std::string endpoint = "192.168.10.1";
  std::string record, ui_dir;
  bool headless = false, takeoff = false, follow = false;
  std::uint16_t bridge_port = 8080;
  std::uint64_t ticks = 0;
  int timeout_ms = 7000;
  auto* fly = app.add_subcommand("fly", "Run the controller against a drone or simulator");
  fly->add_option("--endpoint", endpoint, "host[:cmd[:state:video]]");
  fly->add_option("--record", record, "Record sessions into this directory");
  fly->add_flag("--headless", headless, "No bridge / UI");
  fly->add_option("--bridge-port", bridge_port, "Bridge HTTP/websocket port");
  fly->add_option("--ui", ui_dir, "Static UI directory served by the bridge");
  fly->add_option("--ticks", ticks, "Stop after this many ticks (0 runs until interrupted)");
  fly->add_flag("--takeoff", takeoff, "Take off on the first tick and land on exit");
  fly->add_flag("--follow", follow, "Start in follow-me mode");
  fly->add_option("--timeout", timeout_ms, "Command reply timeout in ms");

  std::string session;
  bool check = false;
  auto* replay = app.add_subcommand("replay", "Re-run a recorded session through the controller");
  replay->add_option("session", session, "Session directory")->required();
  replay->add_flag("--check", check, "Compare with the recorded commands; exit 1 on mismatch");

  std::string conf_endpoint = "192.168.10.1";
  bool no_flight = false;
  int conf_timeout = 3000;
  auto* conformance = app.add_subcommand("conformance", "Protocol conformance checks against an endpoint");
  conformance->add_option("--endpoint", conf_endpoint, "host[:cmd[:state:video]]");
  conformance->add_flag("--no-flight", no_flight, "Skip takeoff/rc/land");
  conformance->add_option("--timeout", conf_timeout, "Reply timeout in ms");

  double demo_seconds = 30.0;
  std::string demo_target = "static:2.5,-0.5,1.1";
  std::string demo_record;
  auto* demo = app.add_subcommand("demo", "In-process follow-me run against the simulator, no sockets");
  demo->add_option("--seed", seed, "RNG seed");
  demo->add_option("--noise", noise, "Horizontal velocity noise std in m/s");
  demo->add_option("--target", demo_target, "Target trajectory, as for sim");
  demo->add_option("--seconds", demo_seconds, "Simulated seconds");
  demo->add_option("--record", demo_record, "Record the run into this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  try {
    if (*sim) return run_sim(seed, noise, target, ports, duration, lag);
    if (*replay) return run_replay(session, check);
    if (*conformance) return run_conformance(conf_endpoint, !no_flight, conf_timeout);
    if (*demo) return run_demo(seed, noise, demo_target, demo_seconds, demo_record);
    if (*fly) {
      ald::station::FlightOptions options;
      options.client.endpoint = ald::protocol::Endpoint::parse(endpoint);
      options.client.timeout = std::chrono::milliseconds(timeout_ms);
      if (!record.empty()) options.record_dir = record;
      if (!headless) {
        ald::station::BridgeOptions bo;
        bo.port = bridge_port;
        bo.ui_dir = ui_dir;
        options.bridge = bo;
      }
      options.max_ticks = ticks;
      options.takeoff = takeoff;
      options.follow = follow;
      const auto s = ald::station::run_flight(options, &g_stop);
      std::cout << "ticks " << s.ticks << ", rc sent " << s.rc_sent << ", commands ok "
                << s.commands_ok << ", failed " << s.commands_failed << ", frames " << s.frames_seen
                << '\n';
      for (const auto& m : s.sessions) {
        std::cout << "session " << m.session_id << ": " << m.frame_count << " frames"
                  << (m.write_failed ? " (write failed: " + m.failure + ")" : "") << '\n';
      }
      return 0;
    }
  } catch (const ald::station::UnreachableError& e) {
    std::cerr << "unreachable: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
