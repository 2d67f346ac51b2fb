#include "ald/protocol/client.hpp"

#include <charconv>
#include <vector>

namespace ald::protocol {

namespace {

std::uint16_t parse_port(std::string_view text) {
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value > 65535) {
    throw std::invalid_argument("bad port '" + std::string(text) + "'");
  }
  return static_cast<std::uint16_t>(value);
}

constexpr std::chrono::milliseconds kOrphanGrace{200};

}  // namespace

Endpoint Endpoint::parse(std::string_view text) {
  Endpoint out;
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = text.find(':', start);
    parts.push_back(text.substr(start, colon == std::string_view::npos ? colon : colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts.empty() || parts[0].empty() || parts.size() == 3 || parts.size() > 4) {
    throw std::invalid_argument("endpoint must be host, host:cmd or host:cmd:state:video");
  }
  out.host = std::string(parts[0]);
  if (parts.size() >= 2) out.command_port = parse_port(parts[1]);
  if (parts.size() == 4) {
    out.state_port = parse_port(parts[2]);
    out.video_port = parse_port(parts[3]);
  }
  return out;
}

Client::Client(ClientOptions options)
    : options_(std::move(options)),
      drone_(Address::resolve(options_.endpoint.host, options_.endpoint.command_port)) {
  command_socket_.bind(Address::any(0));
  if (options_.listen_state) {
    state_socket_.emplace();
    state_socket_->bind(Address::any(options_.endpoint.state_port));
    local_state_port_ = state_socket_->local_port();
    state_thread_ = std::thread([this] { receive_state(); });
  }
}

Client::~Client() {
  running_ = false;
  if (state_thread_.joinable()) state_thread_.join();
}

std::uint16_t Client::local_command_port() const { return command_socket_.local_port(); }

void Client::receive_state() {
  while (running_) {
    bool oversize = false;
    auto dgram = state_socket_->receive(std::chrono::milliseconds(50), &oversize);
    if (!dgram || oversize) continue;
    try {
      Telemetry t = parse_state(dgram->payload);
      {
        std::lock_guard lock(telemetry_mutex_);
        telemetry_ = t;
      }
      ++telemetry_count_;
    } catch (const ParseError&) {
      ++telemetry_errors_;
    }
  }
}

std::optional<Telemetry> Client::latest_telemetry() const {
  std::lock_guard lock(telemetry_mutex_);
  return telemetry_;
}

void Client::drain_stale() {
  // Responses to commands that already timed out, or to urgent sends.
  while (command_socket_.receive(std::chrono::milliseconds(0))) {
    if (orphans_ > 0) --orphans_;
  }
  const auto deadline = std::chrono::steady_clock::now() + kOrphanGrace;
  while (orphans_ > 0 && std::chrono::steady_clock::now() < deadline) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (command_socket_.receive(left)) --orphans_;
  }
  orphans_ = 0;
}

std::optional<CommandOutcome> Client::send_command(std::string_view text) {
  if (is_rc_text(text)) {
    std::lock_guard send_lock(send_mutex_);
    command_socket_.send_to(text, drone_);
    return std::nullopt;
  }

  std::lock_guard lock(command_mutex_);
  drain_stale();
  {
    std::lock_guard send_lock(send_mutex_);
    command_socket_.send_to(text, drone_);
  }

  const auto deadline = std::chrono::steady_clock::now() + options_.timeout;
  while (true) {
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      // A late reply to this command must not be paired with the next one.
      ++orphans_;
      return CommandOutcome::timeout();
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now);
    bool oversize = false;
    auto dgram = command_socket_.receive(std::max(left, std::chrono::milliseconds(1)), &oversize);
    if (!dgram || oversize) continue;
    if (!(dgram->from == drone_)) continue;
    return CommandOutcome::classify(text, dgram->payload);
  }
}

CommandOutcome Client::send(Verb verb) { return *send_command(encode_simple(verb)); }

void Client::send_rc(const RcCommand& cmd) { send_command(encode_rc(cmd)); }

void Client::send_urgent(std::string_view text) {
  {
    std::lock_guard send_lock(send_mutex_);
    command_socket_.send_to(text, drone_);
  }
  if (!is_rc_text(text)) ++orphans_;
}

}  // namespace ald::protocol
