#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include "ald/protocol/commands.hpp"
#include "ald/protocol/rc_command.hpp"
#include "ald/protocol/telemetry.hpp"
#include "ald/protocol/udp_socket.hpp"

namespace ald::protocol {

inline constexpr std::uint16_t kCommandPort = 8889;
inline constexpr std::uint16_t kStatePort = 8890;
inline constexpr std::uint16_t kVideoPort = 11111;

struct Endpoint {
  std::string host = "192.168.10.1";
  std::uint16_t command_port = kCommandPort;
  std::uint16_t state_port = kStatePort;  // bound locally; the drone sends state here
  std::uint16_t video_port = kVideoPort;

  /// "host", "host:cmd" or "host:cmd:state:video".
  static Endpoint parse(std::string_view text);
};

struct ClientOptions {
  Endpoint endpoint;
  std::chrono::milliseconds timeout{7000};
  bool listen_state = true;
};

/// Session with one drone (hardware or simulator).
///
/// Telemetry reception runs on an internal thread. Non-rc commands are
/// serialized: one in flight at a time, answered FIFO by one datagram each.
/// rc datagrams are fire-and-forget and never consume a response.
class Client {
 public:
  explicit Client(ClientOptions options);
  ~Client();
  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  /// Sends `text` and waits for its response. For rc text nothing is
  /// awaited and nullopt is returned.
  std::optional<CommandOutcome> send_command(std::string_view text);
  CommandOutcome send(Verb verb);
  void send_rc(const RcCommand& cmd);

  /// Transmits without waiting behind an in-flight command. The reply is
  /// discarded when it arrives. Used for emergency stops.
  void send_urgent(std::string_view text);

  std::optional<Telemetry> latest_telemetry() const;
  std::uint64_t telemetry_count() const noexcept { return telemetry_count_.load(); }
  std::uint64_t telemetry_errors() const noexcept { return telemetry_errors_.load(); }

  std::uint16_t local_state_port() const noexcept { return local_state_port_; }
  std::uint16_t local_command_port() const;
  const Endpoint& endpoint() const noexcept { return options_.endpoint; }

 private:
  void receive_state();
  void drain_stale();

  ClientOptions options_;
  Address drone_;
  UdpSocket command_socket_;
  std::mutex command_mutex_;
  std::mutex send_mutex_;
  std::atomic<int> orphans_{0};

  std::optional<UdpSocket> state_socket_;
  std::uint16_t local_state_port_ = 0;
  mutable std::mutex telemetry_mutex_;
  std::optional<Telemetry> telemetry_;
  std::atomic<std::uint64_t> telemetry_count_{0};
  std::atomic<std::uint64_t> telemetry_errors_{0};
  std::atomic<bool> running_{true};
  std::thread state_thread_;
};

}  // namespace ald::protocol
