#include "ald/protocol/udp_socket.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>

#include "ald/protocol/commands.hpp"

namespace ald::protocol {

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw TransportError(what + ": " + std::strerror(errno));
}

}  // namespace

Address Address::resolve(const std::string& host, std::uint16_t port) {
  Address out;
  out.addr.sin_family = AF_INET;
  out.addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &out.addr.sin_addr) == 1) return out;

  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_DGRAM;
  addrinfo* result = nullptr;
  if (::getaddrinfo(host.c_str(), nullptr, &hints, &result) != 0 || result == nullptr) {
    throw TransportError("cannot resolve host '" + host + "'");
  }
  out.addr.sin_addr = reinterpret_cast<sockaddr_in*>(result->ai_addr)->sin_addr;
  ::freeaddrinfo(result);
  return out;
}

Address Address::any(std::uint16_t port) {
  Address out;
  out.addr.sin_family = AF_INET;
  out.addr.sin_port = htons(port);
  out.addr.sin_addr.s_addr = htonl(INADDR_ANY);
  return out;
}

std::uint16_t Address::port() const noexcept { return ntohs(addr.sin_port); }

std::string Address::host() const {
  std::array<char, INET_ADDRSTRLEN> buf{};
  ::inet_ntop(AF_INET, &addr.sin_addr, buf.data(), buf.size());
  return buf.data();
}

bool operator==(const Address& a, const Address& b) noexcept {
  return a.addr.sin_port == b.addr.sin_port && a.addr.sin_addr.s_addr == b.addr.sin_addr.s_addr;
}

UdpSocket::UdpSocket() {
  fd_ = ::socket(AF_INET, SOCK_DGRAM, IPPROTO_UDP);
  if (fd_ < 0) fail("socket");
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
}

UdpSocket::~UdpSocket() { close(); }

UdpSocket::UdpSocket(UdpSocket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

UdpSocket& UdpSocket::operator=(UdpSocket&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = other.fd_;
    other.fd_ = -1;
  }
  return *this;
}

void UdpSocket::close() noexcept {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void UdpSocket::bind(const Address& local) {
  if (::bind(fd_, reinterpret_cast<const sockaddr*>(&local.addr), sizeof(local.addr)) < 0) {
    fail("bind to port " + std::to_string(local.port()));
  }
}

std::uint16_t UdpSocket::local_port() const {
  sockaddr_in addr{};
  socklen_t len = sizeof(addr);
  if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) < 0) fail("getsockname");
  return ntohs(addr.sin_port);
}

void UdpSocket::send_to(std::string_view payload, const Address& to) {
  if (payload.size() > kMaxDatagram) throw TransportError("datagram exceeds 1024 bytes");
  const auto sent = ::sendto(fd_, payload.data(), payload.size(), 0,
                             reinterpret_cast<const sockaddr*>(&to.addr), sizeof(to.addr));
  if (sent < 0) fail("sendto");
}

std::optional<Datagram> UdpSocket::receive(std::chrono::milliseconds timeout, bool* oversize) {
  if (oversize != nullptr) *oversize = false;
  pollfd pfd{fd_, POLLIN, 0};
  const int ready = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
  if (ready < 0) {
    if (errno == EINTR) return std::nullopt;
    fail("poll");
  }
  if (ready == 0) return std::nullopt;

  std::array<char, 2048> buf{};
  Datagram out;
  socklen_t len = sizeof(out.from.addr);
  const auto n = ::recvfrom(fd_, buf.data(), buf.size(), MSG_TRUNC,
                            reinterpret_cast<sockaddr*>(&out.from.addr), &len);
  if (n < 0) {
    if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) return std::nullopt;
    // ICMP port-unreachable from an earlier send surfaces here on Linux.
    if (errno == ECONNREFUSED) return std::nullopt;
    fail("recvfrom");
  }
  if (static_cast<std::size_t>(n) > kMaxDatagram) {
    if (oversize != nullptr) *oversize = true;
    return out;
  }
  out.payload.assign(buf.data(), static_cast<std::size_t>(n));
  return out;
}

}  // namespace ald::protocol
