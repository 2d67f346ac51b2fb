#include "ald/station/recorder.hpp"

#include <cmath>
#include <cstdio>

#include "ald/vision/ppm.hpp"

namespace ald::station {

namespace fs = std::filesystem;

namespace {

std::string frame_name(std::size_t number) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frames/%06zu.ppm", number);
  return buf;
}

std::int64_t to_micros(double seconds) { return std::llround(seconds * 1e6); }

}  // namespace

Recorder::Recorder(fs::path dir, RecorderOptions options)
    : dir_(std::move(dir)), options_(std::move(options)) {
  if (options_.fps <= 0.0) throw std::invalid_argument("recorder fps must be positive");
  fs::create_directories(dir_ / "frames");
  manifest_.session_id = options_.session_id.empty() ? dir_.filename().string() : options_.session_id;
  manifest_.start_time = utc_timestamp();
  manifest_.tick_ms = options_.tick_ms;
  manifest_.initial_state = options_.initial_state;
  manifest_.config = options_.config;

  telemetry_.open(dir_ / manifest_.telemetry_file);
  commands_.open(dir_ / manifest_.command_file);
  inputs_.open(dir_ / manifest_.inputs_file);
  if (!telemetry_ || !commands_ || !inputs_) {
    throw std::runtime_error("cannot create session files in " + dir_.string());
  }
  writer_ = std::thread([this] { write_loop(); });
}

Recorder::~Recorder() {
  try {
    stop();
  } catch (...) {
  }
}

void Recorder::push(Item item) {
  {
    std::lock_guard lock(mutex_);
    if (stopping_ || failed_) return;
    queue_.push_back(std::move(item));
  }
  cv_.notify_one();
}

void Recorder::offer_frame(std::shared_ptr<const vision::Frame> frame, double t_seconds) {
  const std::int64_t now = to_micros(t_seconds);
  {
    std::lock_guard lock(mutex_);
    if (stopping_ || failed_) return;
    while (to_micros(static_cast<double>(next_slot_) / options_.fps) <= now) {
      ++next_slot_;
      if (!frame) continue;
      if (frames_queued_ >= options_.frame_queue_capacity) {
        ++frames_dropped_;
        continue;
      }
      ++frames_queued_;
      queue_.push_back(FrameItem{next_number_++, frame});
    }
  }
  cv_.notify_one();
}

bool Recorder::frame_due(double t_seconds) const {
  std::lock_guard lock(mutex_);
  if (stopping_ || failed_) return false;
  return to_micros(static_cast<double>(next_slot_) / options_.fps) <= to_micros(t_seconds);
}

void Recorder::record_telemetry(const TelemetryRecord& record) {
  push(LineItem{&telemetry_, telemetry_line(record)});
}

void Recorder::record_command(const CommandRecord& record) {
  push(LineItem{&commands_, command_line(record)});
}

void Recorder::record_input(const TickInput& input) { push(LineItem{&inputs_, input_line(input)}); }

void Recorder::fail(const std::string& what) {
  std::lock_guard lock(mutex_);
  if (!failed_) failure_ = what;
  failed_ = true;
  queue_.clear();
  frames_queued_ = 0;
}

void Recorder::write_loop() {
  while (true) {
    Item item;
    {
      std::unique_lock lock(mutex_);
      cv_.wait(lock, [this] { return !queue_.empty() || stopping_; });
      if (queue_.empty()) return;
      item = std::move(queue_.front());
      queue_.pop_front();
      if (std::holds_alternative<FrameItem>(item)) --frames_queued_;
    }
    if (failed_) continue;

    if (auto* frame = std::get_if<FrameItem>(&item)) {
      const std::string name = frame_name(frame->number);
      try {
        vision::write_ppm(dir_ / name, *frame->frame);
      } catch (const std::exception& e) {
        fail(e.what());
        continue;
      }
      std::lock_guard lock(mutex_);
      frame_files_.push_back(name);
    } else {
      auto& line = std::get<LineItem>(item);
      *line.stream << line.line << '\n';
      if (!*line.stream) fail("session log write failed in " + dir_.string());
    }
  }
}

SessionManifest Recorder::stop() {
  {
    std::lock_guard lock(mutex_);
    if (stopped_) return manifest_;
    stopping_ = true;
  }
  cv_.notify_all();
  if (writer_.joinable()) writer_.join();

  telemetry_.flush();
  commands_.flush();
  inputs_.flush();
  if (!telemetry_ || !commands_ || !inputs_) fail("session log flush failed in " + dir_.string());

  std::lock_guard lock(mutex_);
  stopped_ = true;
  manifest_.frame_files = frame_files_;
  manifest_.frame_count = frame_files_.size();
  manifest_.frames_dropped = frames_dropped_;
  manifest_.write_failed = failed_;
  manifest_.failure = failure_;
  try {
    write_manifest(dir_, manifest_);
  } catch (const std::exception& e) {
    manifest_.write_failed = true;
    if (manifest_.failure.empty()) manifest_.failure = e.what();
  }
  return manifest_;
}

}  // namespace ald::station
