#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <variant>

#include "ald/station/session.hpp"
#include "ald/vision/frame.hpp"

namespace ald::station {

struct RecorderOptions {
  double fps = 30.0;
  std::size_t frame_queue_capacity = 90;
  int tick_ms = 50;
  std::string session_id;  // defaults to the directory name
  control::ControlState initial_state;
  nlohmann::json config = nlohmann::json::object();
};

/// Writes a session directory from a background thread. Every record_* /
/// offer_* call returns without touching the disk; frames beyond the queue
/// capacity are dropped and counted. A write failure stops recording and is
/// reported through failed() and the manifest, never as an exception.
class Recorder {
 public:
  Recorder(std::filesystem::path dir, RecorderOptions options = {});
  ~Recorder();
  Recorder(const Recorder&) = delete;
  Recorder& operator=(const Recorder&) = delete;

  /// Frames are sampled at the nominal rate: each slot k/fps <= t takes the
  /// most recent frame offered, so a slow source yields repeated frames.
  void offer_frame(std::shared_ptr<const vision::Frame> frame, double t_seconds);
  /// True when offer_frame(t) would fill at least one slot; lets callers skip
  /// rendering frames nobody will write.
  bool frame_due(double t_seconds) const;
  void record_telemetry(const TelemetryRecord& record);
  void record_command(const CommandRecord& record);
  void record_input(const TickInput& input);

  /// Flushes everything, writes manifest.json and returns it. Idempotent.
  SessionManifest stop();

  bool failed() const noexcept { return failed_.load(); }
  std::uint64_t frames_dropped() const noexcept { return frames_dropped_.load(); }
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  struct FrameItem {
    std::size_t number;
    std::shared_ptr<const vision::Frame> frame;
  };
  struct LineItem {
    std::ofstream* stream;
    std::string line;
  };
  using Item = std::variant<FrameItem, LineItem>;

  void push(Item item);
  void write_loop();
  void fail(const std::string& what);

  std::filesystem::path dir_;
  RecorderOptions options_;
  SessionManifest manifest_;
  std::ofstream telemetry_;
  std::ofstream commands_;
  std::ofstream inputs_;

  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<Item> queue_;
  std::size_t frames_queued_ = 0;
  std::uint64_t next_slot_ = 0;
  std::size_t next_number_ = 0;
  std::vector<std::string> frame_files_;  // guarded by mutex_
  bool stopping_ = false;
  bool stopped_ = false;

  std::atomic<bool> failed_{false};
  std::atomic<std::uint64_t> frames_dropped_{0};
  std::string failure_;
  std::thread writer_;
};

}  // namespace ald::station
