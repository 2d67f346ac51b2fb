#include "ald/sim/server.hpp"

#include <chrono>
#include <cmath>
#include <vector>

#include "ald/sim/camera.hpp"
#include "tcp.hpp"

namespace ald::sim {

using Clock = std::chrono::steady_clock;

SimServer::SimServer(SimWorld world, ServerOptions options)
    : options_(options), core_(std::move(world)) {
  command_socket_.bind(protocol::Address::any(options_.command_port));
  command_port_ = command_socket_.local_port();

  auto listener = detail::tcp_listen(options_.video_port);
  video_port_ = detail::local_port(listener);
  video_listen_fd_ = ::dup(listener.get());

  snapshot_ = std::make_shared<WorldSnapshot>(WorldSnapshot{core_.world(), {}, 0});
  tick_thread_ = std::thread([this] { tick_loop(); });
  video_thread_ = std::thread([this] { video_loop(); });
}

SimServer::~SimServer() {
  stop();
  if (video_listen_fd_ >= 0) ::close(video_listen_fd_);
}

void SimServer::stop() {
  running_ = false;
  frame_cv_.notify_all();
  if (tick_thread_.joinable()) tick_thread_.join();
  if (video_thread_.joinable()) video_thread_.join();
}

std::shared_ptr<const WorldSnapshot> SimServer::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return snapshot_;
}

void SimServer::tick_loop() {
  const double dt = 1.0 / options_.step_rate;
  const auto period = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(dt));
  const auto steps_per_state =
      std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::lround(options_.step_rate / options_.state_rate)));
  const double frame_interval = 1.0 / options_.video_fps;
  double next_frame_time = 0.0;
  std::optional<protocol::Address> controller;

  auto next = Clock::now() + period;
  while (running_) {
    // Commands are handled on this thread, between steps.
    while (running_) {
      const auto now = Clock::now();
      if (now >= next) break;
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(next - now);
      bool oversize = false;
      auto dgram = command_socket_.receive(std::max(left, std::chrono::milliseconds(0)), &oversize);
      if (!dgram) {
        if (left.count() == 0) std::this_thread::sleep_until(next);
        continue;
      }
      controller = dgram->from;
      const auto reply = oversize ? std::optional<std::string>("error") : core_.handle(dgram->payload);
      if (reply) command_socket_.send_to(*reply, dgram->from);
    }

    core_.advance(dt);
    next += period;
    if (Clock::now() - next > std::chrono::seconds(1)) next = Clock::now() + period;

    {
      auto snap = std::make_shared<WorldSnapshot>(WorldSnapshot{core_.world(), core_.setpoint(), core_.steps()});
      std::lock_guard lock(snapshot_mutex_);
      snapshot_ = std::move(snap);
    }

    if (controller && core_.steps() % steps_per_state == 0) {
      auto dest = *controller;
      dest.addr.sin_port = htons(options_.state_port);
      try {
        state_socket_.send_to(protocol::format_state(telemetry_of(core_.world())), dest);
      } catch (const protocol::TransportError&) {
      }
    }

    const auto& world = core_.world();
    if (world.streaming && video_clients_ > 0 && world.time >= next_frame_time) {
      next_frame_time = world.time + frame_interval;
      publish_frame(world);
    }
  }
}

void SimServer::publish_frame(const SimWorld& world) {
  auto frame = std::make_shared<const vision::Frame>(render_camera(world));
  {
    std::lock_guard lock(frame_mutex_);
    pending_frame_ = IndexedFrame{frame_index_++, std::move(frame)};
  }
  frame_cv_.notify_one();
}

void SimServer::video_loop() {
  std::vector<detail::Fd> clients;
  while (running_) {
    if (detail::wait_readable(video_listen_fd_, 0)) {
      const int fd = ::accept(video_listen_fd_, nullptr, nullptr);
      if (fd >= 0) {
        clients.emplace_back(fd);
        video_clients_ = static_cast<int>(clients.size());
      }
    }

    std::optional<IndexedFrame> frame;
    {
      std::unique_lock lock(frame_mutex_);
      frame_cv_.wait_for(lock, std::chrono::milliseconds(10),
                         [this] { return pending_frame_.has_value() || !running_; });
      frame.swap(pending_frame_);
    }
    if (!frame) continue;

    const std::string bytes = encode_frame_message(*frame->frame, frame->index);
    for (auto it = clients.begin(); it != clients.end();) {
      if (detail::send_all(it->get(), bytes)) {
        ++frames_sent_;
        ++it;
      } else {
        it = clients.erase(it);
      }
    }
    video_clients_ = static_cast<int>(clients.size());
  }
}

}  // namespace ald::sim
