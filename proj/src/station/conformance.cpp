#include "ald/station/conformance.hpp"

#include <charconv>
#include <thread>

#include "ald/protocol/udp_socket.hpp"
#include "ald/sim/frame_stream.hpp"
#include "ald/station/flight_loop.hpp"

namespace ald::station {

using namespace std::chrono_literals;
using protocol::Address;
using protocol::UdpSocket;

namespace {

class Probe {
 public:
  Probe(const protocol::Endpoint& ep, std::chrono::milliseconds timeout)
      : drone_(Address::resolve(ep.host, ep.command_port)), timeout_(timeout) {
    socket_.bind(Address::any(0));
  }

  void send(std::string_view text) { socket_.send_to(text, drone_); }

  /// Next reply from the drone address, or nullopt on timeout.
  std::optional<std::string> reply(std::chrono::milliseconds wait) {
    const auto deadline = std::chrono::steady_clock::now() + wait;
    while (true) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left <= 0ms) return std::nullopt;
      auto d = socket_.receive(left);
      if (!d) return std::nullopt;
      if (d->from == drone_) return d->payload;
    }
  }

  std::optional<std::string> ask(std::string_view text) {
    send(text);
    return reply(timeout_);
  }

 private:
  UdpSocket socket_;
  Address drone_;
  std::chrono::milliseconds timeout_;
};

template <class Pred>
bool wait_for(Pred pred, std::chrono::milliseconds limit) {
  const auto deadline = std::chrono::steady_clock::now() + limit;
  while (std::chrono::steady_clock::now() < deadline) {
    if (pred()) return true;
    std::this_thread::sleep_for(20ms);
  }
  return pred();
}

std::string show(const std::optional<std::string>& r) { return r ? "'" + *r + "'" : "no reply"; }

}  // namespace

std::vector<CheckResult> run_conformance(const ConformanceOptions& options) {
  std::vector<CheckResult> out;
  auto check = [&](std::string name, bool ok, std::string detail) {
    out.push_back({std::move(name), ok, std::move(detail)});
    return ok;
  };

  protocol::ClientOptions co;
  co.endpoint = options.endpoint;
  co.timeout = options.timeout;
  protocol::Client state(co);  // only used for its telemetry listener
  Probe probe(options.endpoint, options.timeout);

  const auto hello = probe.ask("command");
  if (!hello) {
    throw UnreachableError("no reply from " + options.endpoint.host + ":" +
                           std::to_string(options.endpoint.command_port));
  }
  check("sdk mode", *hello == "ok", "command -> " + show(hello));

  const auto battery = probe.ask("battery?");
  int level = -1;
  bool numeric = false;
  if (battery) {
    auto [p, ec] = std::from_chars(battery->data(), battery->data() + battery->size(), level);
    numeric = ec == std::errc{} && p == battery->data() + battery->size();
  }
  check("battery query", numeric && level >= 0 && level <= 100, "battery? -> " + show(battery));

  const bool streaming_state = wait_for([&] { return state.telemetry_count() >= 5; }, 2000ms);
  check("state packets", streaming_state && state.telemetry_errors() == 0,
        std::to_string(state.telemetry_count()) + " parsed, " +
            std::to_string(state.telemetry_errors()) + " rejected");

  probe.send("rc 0 0 0 0");
  const auto paired = probe.ask("command");
  const auto extra = probe.reply(300ms);
  check("rc unanswered", paired == "ok" && !extra,
        "command after rc -> " + show(paired) + ", then " + show(extra));

  const auto bogus = probe.ask("bogus");
  check("unknown command", bogus && *bogus != "ok", "bogus -> " + show(bogus));
  const auto range = probe.ask("rc 101 0 0 0");
  check("rc out of range", range && *range == "error", "rc 101 0 0 0 -> " + show(range));

  const auto on = probe.ask("streamon");
  bool frame_ok = false;
  std::string frame_detail;
  if (on == "ok") {
    sim::FrameStreamReader reader(options.endpoint.host, options.endpoint.video_port);
    frame_ok = wait_for([&] { return reader.latest().has_value(); }, 2000ms);
    if (frame_ok) {
      const auto f = reader.latest();
      frame_detail = ", frame " + std::to_string(f->frame->width) + "x" + std::to_string(f->frame->height);
    }
  }
  const auto off = probe.ask("streamoff");
  check("video stream", on == "ok" && frame_ok && off == "ok",
        "streamon -> " + show(on) + frame_detail + ", streamoff -> " + show(off));

  if (options.flight) {
    const auto up = probe.ask("takeoff");
    const bool airborne = up == "ok" && wait_for([&] {
                            auto t = state.latest_telemetry();
                            return t && t->height > 0;
                          }, 2000ms);
    for (int i = 0; i < 10; ++i) {
      probe.send("rc 0 50 0 0");
      std::this_thread::sleep_for(50ms);
    }
    probe.send("rc 0 0 0 0");
    const auto down = probe.ask("land");
    const bool landed = down == "ok" && wait_for([&] {
                          auto t = state.latest_telemetry();
                          return t && t->height == 0;
                        }, 3000ms);
    check("flight", airborne && landed,
          "takeoff -> " + show(up) + (airborne ? " airborne" : " not airborne") + ", land -> " +
              show(down) + (landed ? " on ground" : " still airborne"));
  }
  return out;
}

}  // namespace ald::station
