#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "ald/vision/frame.hpp"

namespace ald::sim {

// Frame stream wire format over TCP, all integers big-endian:
//   u32 length (bytes that follow)
//   u32 width, u32 height, u64 frame index   (16-byte header)
//   width * height * 3 bytes of row-major RGB

struct IndexedFrame {
  std::uint64_t index = 0;
  std::shared_ptr<const vision::Frame> frame;
};

std::string encode_frame_message(const vision::Frame& frame, std::uint64_t index);

/// Incremental decoder; tolerates arbitrary chunking of the byte stream.
class FrameStreamDecoder {
 public:
  /// Throws std::runtime_error when a header is inconsistent.
  std::vector<IndexedFrame> feed(std::string_view bytes);
  std::size_t buffered() const noexcept { return buffer_.size(); }

 private:
  std::string buffer_;
};

/// Connects to a frame streamer and keeps the newest frame. Reconnects
/// until stopped.
class FrameStreamReader {
 public:
  FrameStreamReader(std::string host, std::uint16_t port);
  ~FrameStreamReader();
  FrameStreamReader(const FrameStreamReader&) = delete;
  FrameStreamReader& operator=(const FrameStreamReader&) = delete;

  std::optional<IndexedFrame> latest() const;
  std::uint64_t frames_received() const noexcept { return received_.load(); }

 private:
  void run();

  std::string host_;
  std::uint16_t port_;
  mutable std::mutex mutex_;
  std::optional<IndexedFrame> latest_;
  std::atomic<std::uint64_t> received_{0};
  std::atomic<bool> running_{true};
  std::thread thread_;
};

}  // namespace ald::sim
