#pragma once

#include <netinet/in.h>

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ald::protocol {

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Address {
  sockaddr_in addr{};

  static Address resolve(const std::string& host, std::uint16_t port);
  static Address any(std::uint16_t port);
  std::uint16_t port() const noexcept;
  std::string host() const;
  friend bool operator==(const Address& a, const Address& b) noexcept;
};

struct Datagram {
  std::string payload;
  Address from;
};

/// Owning IPv4 UDP socket.
class UdpSocket {
 public:
  UdpSocket();
  ~UdpSocket();
  UdpSocket(const UdpSocket&) = delete;
  UdpSocket& operator=(const UdpSocket&) = delete;
  UdpSocket(UdpSocket&& other) noexcept;
  UdpSocket& operator=(UdpSocket&& other) noexcept;

  /// Binds to the address; port 0 picks an ephemeral port.
  void bind(const Address& local);
  std::uint16_t local_port() const;

  void send_to(std::string_view payload, const Address& to);

  /// Waits up to `timeout` for one datagram. Oversize datagrams (over
  /// kMaxDatagram) are returned with `oversize` set and an empty payload.
  std::optional<Datagram> receive(std::chrono::milliseconds timeout, bool* oversize = nullptr);

  int fd() const noexcept { return fd_; }

 private:
  void close() noexcept;
  int fd_ = -1;
};

}  // namespace ald::protocol
