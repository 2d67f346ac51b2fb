#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ald/protocol/udp_socket.hpp"

namespace testing_support {

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "ald-test-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// A port that was free a moment ago. Good enough for loopback tests.
inline std::uint16_t free_udp_port() {
  ald::protocol::UdpSocket s;
  s.bind(ald::protocol::Address::any(0));
  return s.local_port();
}

/// Answers datagrams on a loopback port with whatever `respond` returns.
class FakeDrone {
 public:
  using Responder = std::function<std::optional<std::string>(const std::string&)>;

  explicit FakeDrone(Responder respond) : respond_(std::move(respond)) {
    socket_.bind(ald::protocol::Address::resolve("127.0.0.1", 0));
    port_ = socket_.local_port();
    thread_ = std::thread([this] { run(); });
  }
  ~FakeDrone() {
    running_ = false;
    thread_.join();
  }

  std::uint16_t port() const { return port_; }
  std::vector<std::string> received() const {
    std::lock_guard lock(mutex_);
    return received_;
  }

 private:
  void run() {
    while (running_) {
      auto d = socket_.receive(std::chrono::milliseconds(20));
      if (!d) continue;
      {
        std::lock_guard lock(mutex_);
        received_.push_back(d->payload);
      }
      if (auto reply = respond_(d->payload)) socket_.send_to(*reply, d->from);
    }
  }

  Responder respond_;
  ald::protocol::UdpSocket socket_;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{true};
  mutable std::mutex mutex_;
  std::vector<std::string> received_;
  std::thread thread_;
};

}  // namespace testing_support
