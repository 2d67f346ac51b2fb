#include "ald/station/flight_loop.hpp"

#include <condition_variable>
#include <deque>
#include <iostream>
#include <mutex>
#include <thread>

#include "ald/sim/frame_stream.hpp"
#include "ald/station/recorder.hpp"

namespace ald::station {

using Clock = std::chrono::steady_clock;

namespace {

// Sends non-rc verbs one at a time off the control thread.
class CommandWorker {
 public:
  explicit CommandWorker(protocol::Client& client) : client_(client) {
    thread_ = std::thread([this] { run(); });
  }
  ~CommandWorker() { finish(); }

  void push(std::string text) {
    {
      std::lock_guard lock(mutex_);
      queue_.push_back(std::move(text));
    }
    cv_.notify_one();
  }

  /// Sends whatever is queued, then stops.
  void finish() {
    {
      std::lock_guard lock(mutex_);
      done_ = true;
    }
    cv_.notify_one();
    if (thread_.joinable()) thread_.join();
  }

  std::uint64_t ok() const { return ok_.load(); }
  std::uint64_t failed() const { return failed_.load(); }

 private:
  void run() {
    while (true) {
      std::string text;
      {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [this] { return !queue_.empty() || done_; });
        if (queue_.empty()) return;
        text = std::move(queue_.front());
        queue_.pop_front();
      }
      const auto outcome = client_.send_command(text);
      if (!outcome) continue;
      if (outcome->kind == protocol::CommandOutcome::Kind::Ok ||
          outcome->kind == protocol::CommandOutcome::Kind::Value) {
        ++ok_;
      } else {
        ++failed_;
        std::cerr << "'" << text << "' -> " << protocol::to_string(outcome->kind)
                  << (outcome->raw.empty() ? "" : " (" + outcome->raw + ")") << '\n';
      }
    }
  }

  protocol::Client& client_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<std::string> queue_;
  bool done_ = false;
  std::atomic<std::uint64_t> ok_{0};
  std::atomic<std::uint64_t> failed_{0};
  std::thread thread_;
};

std::filesystem::path session_dir(const FlightOptions& options, std::size_t n) {
  if (options.record_dir) {
    if (n == 0) return *options.record_dir;
    return options.record_dir->string() + "-" + std::to_string(n);
  }
  std::string stamp = utc_timestamp();
  for (char& c : stamp) {
    if (c == ':') c = '-';
  }
  return options.default_record_root / (stamp + (n ? "-" + std::to_string(n) : ""));
}

}  // namespace

FlightSummary run_flight(const FlightOptions& options, const std::atomic<bool>* stop) {
  options.params.validate();
  protocol::Client client(options.client);
  const auto hello = client.send(protocol::Verb::Command);
  if (hello.kind == protocol::CommandOutcome::Kind::Timeout) {
    throw UnreachableError("no reply from " + options.client.endpoint.host + ":" +
                           std::to_string(options.client.endpoint.command_port));
  }
  if (hello.kind != protocol::CommandOutcome::Kind::Ok) {
    throw UnreachableError("drone refused SDK mode: " + hello.raw);
  }

  sim::FrameStreamReader frames(options.client.endpoint.host, options.client.endpoint.video_port);
  const vision::BlobDetector detector(options.detector);
  std::optional<Bridge> bridge;
  if (options.bridge) {
    bridge.emplace(*options.bridge);
    bridge->on_emergency([&client] { client.send_urgent("emergency"); });
    std::cerr << "bridge listening on port " << bridge->port() << '\n';
  }
  CommandWorker worker(client);

  FlightSummary summary;
  control::ControlState state;
  std::unique_ptr<Recorder> recorder;
  Clock::time_point record_start;
  std::uint64_t last_frame_index = 0;
  bool have_frame_index = false;
  const auto period = std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double>(options.params.tick));
  const auto start = Clock::now();
  auto next = start;

  std::uint64_t tick = 0;
  for (;; ++tick) {
    if (stop && stop->load()) break;
    if (options.max_ticks && tick >= options.max_ticks) break;
    if (state.terminate) break;

    control::KeyState keys;
    std::optional<std::string> gesture;
    if (bridge) {
      auto in = bridge->take_input();
      keys = std::move(in.keys);
      gesture = std::move(in.gesture);
    }
    if (tick == 0) {
      std::string first;
      if (options.takeoff) first += 'e';
      if (options.follow) first += 'k';
      else if (options.record_dir) first += 'r';
      keys.pressed = first + keys.pressed;
    }

    // First pass: which modes are on this tick, independent of the frame.
    const auto modes = control::control_tick(keys, {}, state, options.params);
    const auto latest = frames.latest();
    control::Perception perception;
    std::vector<vision::BoundingBox> boxes;
    if (modes.state.streaming && latest) {
      perception.frame_present = true;
      const auto& frame = *latest->frame;
      if (!have_frame_index || latest->index != last_frame_index) ++summary.frames_seen;
      have_frame_index = true;
      last_frame_index = latest->index;
      if (modes.state.followme) {
        const auto found = detector(frame);
        perception.eyes = vision::best_candidate(found);
        for (const auto& d : found) boxes.push_back(d.box);
      }
      if (modes.state.findfaces) {
        const auto faces = vision::detect_reduced(detector, frame);
        perception.faces = static_cast<int>(faces.size());
        for (const auto& d : faces) boxes.push_back(d.box);
      }
      if (modes.state.gestures && gesture) {
        perception.gesture = control::GestureLabel::from_text(*gesture);
      }
    }

    const control::ControlState before = state;
    const auto result = control::control_tick(keys, perception, state, options.params);
    state = result.state;

    for (auto effect : result.effects) {
      if (effect != control::SideEffect::StartRecorder || recorder) continue;
      RecorderOptions ro;
      ro.initial_state = before;
      ro.tick_ms = static_cast<int>(std::lround(options.params.tick * 1000.0));
      ro.config = {{"endpoint", options.client.endpoint.host},
                   {"command_port", options.client.endpoint.command_port},
                   {"first_tick", tick}};
      try {
        recorder = std::make_unique<Recorder>(session_dir(options, summary.sessions.size()), ro);
        record_start = Clock::now();
      } catch (const std::exception& e) {
        std::cerr << "recording disabled: " << e.what() << '\n';
      }
    }

    const auto texts = commands_for(result);
    for (const auto& text : texts) {
      if (protocol::is_rc_text(text)) {
        client.send_rc(result.command);
        ++summary.rc_sent;
        continue;
      }
      if (text == "emergency") client.send_urgent(text);
      else worker.push(text);
      if (bridge) bridge->publish_command(text);
    }

    const auto telemetry = client.latest_telemetry();
    if (recorder) {
      const double t = std::chrono::duration<double>(Clock::now() - record_start).count();
      const auto t_ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
      recorder->record_input({tick, keys, perception});
      for (const auto& text : texts) recorder->record_command({tick, t_ms, text});
      if (telemetry) recorder->record_telemetry({tick, *telemetry});
      recorder->offer_frame(state.streaming && latest ? latest->frame : nullptr, t);
      if (recorder->failed()) std::cerr << "recording stopped after a write failure\n";
    }
    for (auto effect : result.effects) {
      if (effect == control::SideEffect::StopRecorder && recorder) {
        summary.sessions.push_back(recorder->stop());
        recorder.reset();
      }
    }

    if (bridge) {
      if (tick % 2 == 0) {
        if (telemetry) bridge->publish_telemetry(*telemetry);
        StatusView view{state, telemetry, perception.faces, boxes,
                        telemetry && telemetry->height > 0, true};
        bridge->publish_status(make_status(view));
      }
      if (state.streaming && latest) bridge->publish_frame(*latest->frame, latest->index);
    }

    next += period;
    const auto now = Clock::now();
    if (now > next + period) next = now;  // fell behind; do not burst to catch up
    std::this_thread::sleep_until(next);
  }

  client.send_rc({});
  if (options.takeoff && options.land_on_exit) worker.push("land");
  worker.finish();
  if (recorder) summary.sessions.push_back(recorder->stop());
  if (bridge) bridge->stop();

  summary.ticks = tick;
  summary.commands_ok = worker.ok();
  summary.commands_failed = worker.failed();
  summary.final_state = state;
  summary.last_telemetry = client.latest_telemetry();
  return summary;
}

}  // namespace ald::station
