#include "ald/sim/frame_stream.hpp"

#include <array>
#include <chrono>
#include <stdexcept>

#include "tcp.hpp"

namespace ald::sim {

namespace {

constexpr std::size_t kHeader = 16;
constexpr std::uint32_t kMaxMessage = 64u << 20;

void put_u32(std::string& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>((v >> shift) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<char>((v >> shift) & 0xff));
}

std::uint64_t get_be(std::string_view bytes, std::size_t at, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v = (v << 8) | static_cast<std::uint8_t>(bytes[at + i]);
  return v;
}

}  // namespace

std::string encode_frame_message(const vision::Frame& frame, std::uint64_t index) {
  std::string out;
  out.reserve(4 + kHeader + frame.pixels.size());
  put_u32(out, static_cast<std::uint32_t>(kHeader + frame.pixels.size()));
  put_u32(out, static_cast<std::uint32_t>(frame.width));
  put_u32(out, static_cast<std::uint32_t>(frame.height));
  put_u64(out, index);
  out.append(reinterpret_cast<const char*>(frame.pixels.data()), frame.pixels.size());
  return out;
}

std::vector<IndexedFrame> FrameStreamDecoder::feed(std::string_view bytes) {
  buffer_.append(bytes);
  std::vector<IndexedFrame> out;
  std::size_t pos = 0;
  while (buffer_.size() - pos >= 4) {
    const auto length = static_cast<std::uint32_t>(get_be(buffer_, pos, 4));
    if (length < kHeader || length > kMaxMessage) {
      throw std::runtime_error("frame stream: bad message length " + std::to_string(length));
    }
    if (buffer_.size() - pos < 4 + length) break;
    const auto w = static_cast<std::uint32_t>(get_be(buffer_, pos + 4, 4));
    const auto h = static_cast<std::uint32_t>(get_be(buffer_, pos + 8, 4));
    const auto index = get_be(buffer_, pos + 12, 8);
    if (std::uint64_t{w} * h * 3 != length - kHeader) {
      throw std::runtime_error("frame stream: size does not match dimensions");
    }
    auto frame = std::make_shared<vision::Frame>(static_cast<int>(w), static_cast<int>(h));
    std::copy_n(buffer_.data() + pos + 4 + kHeader, length - kHeader,
                reinterpret_cast<char*>(frame->pixels.data()));
    out.push_back({index, std::move(frame)});
    pos += 4 + length;
  }
  buffer_.erase(0, pos);
  return out;
}

FrameStreamReader::FrameStreamReader(std::string host, std::uint16_t port)
    : host_(std::move(host)), port_(port), thread_([this] { run(); }) {}

FrameStreamReader::~FrameStreamReader() {
  running_ = false;
  if (thread_.joinable()) thread_.join();
}

std::optional<IndexedFrame> FrameStreamReader::latest() const {
  std::lock_guard lock(mutex_);
  return latest_;
}

void FrameStreamReader::run() {
  const auto address = protocol::Address::resolve(host_, port_);
  std::array<char, 1 << 16> chunk{};
  while (running_) {
    auto fd = detail::tcp_connect(address);
    if (!fd) {
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
      continue;
    }
    FrameStreamDecoder decoder;
    while (running_) {
      if (!detail::wait_readable(fd.get(), 50)) continue;
      const auto n = ::recv(fd.get(), chunk.data(), chunk.size(), 0);
      if (n <= 0) break;
      try {
        for (auto& f : decoder.feed({chunk.data(), static_cast<std::size_t>(n)})) {
          std::lock_guard lock(mutex_);
          latest_ = std::move(f);
          ++received_;
        }
      } catch (const std::runtime_error&) {
        break;  // desynchronized; reconnect
      }
    }
  }
}

}  // namespace ald::sim
