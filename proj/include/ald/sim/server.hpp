#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>

#include "ald/protocol/udp_socket.hpp"
#include "ald/sim/frame_stream.hpp"
#include "ald/sim/sim_core.hpp"

namespace ald::sim {

struct ServerOptions {
  std::uint16_t command_port = 8889;  // 0 picks an ephemeral port
  std::uint16_t state_port = 8890;    // destination port on the controlling host
  std::uint16_t video_port = 11111;   // 0 picks an ephemeral port
  double step_rate = 100.0;           // Hz
  double state_rate = 10.0;           // Hz
  double video_fps = 30.0;
};

struct WorldSnapshot {
  SimWorld world;
  protocol::RcCommand setpoint;
  std::uint64_t steps = 0;
};

/// A simulated drone on UDP. One tick thread owns the world: it answers
/// commands, steps at a fixed rate with the latest rc setpoint, and sends
/// state packets to whoever last sent a command. Frames go out over TCP on a
/// separate thread while streaming is on.
class SimServer {
 public:
  SimServer(SimWorld world, ServerOptions options = {});
  ~SimServer();
  SimServer(const SimServer&) = delete;
  SimServer& operator=(const SimServer&) = delete;

  void stop();

  std::uint16_t command_port() const noexcept { return command_port_; }
  std::uint16_t video_port() const noexcept { return video_port_; }
  std::shared_ptr<const WorldSnapshot> snapshot() const;
  std::uint64_t frames_sent() const noexcept { return frames_sent_.load(); }

 private:
  void tick_loop();
  void video_loop();
  void publish_frame(const SimWorld& world);

  ServerOptions options_;
  SimCore core_;
  protocol::UdpSocket command_socket_;
  protocol::UdpSocket state_socket_;
  std::uint16_t command_port_ = 0;
  std::uint16_t video_port_ = 0;
  int video_listen_fd_ = -1;

  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const WorldSnapshot> snapshot_;

  std::mutex frame_mutex_;
  std::condition_variable frame_cv_;
  std::optional<IndexedFrame> pending_frame_;
  std::uint64_t frame_index_ = 0;
  std::atomic<int> video_clients_{0};
  std::atomic<std::uint64_t> frames_sent_{0};

  std::atomic<bool> running_{true};
  std::thread tick_thread_;
  std::thread video_thread_;
};

}  // namespace ald::sim
