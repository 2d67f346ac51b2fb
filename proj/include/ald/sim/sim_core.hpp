#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "ald/protocol/rc_command.hpp"
#include "ald/sim/world.hpp"

namespace ald::sim {

/// The drone's command interpreter and setpoint-hold stepping, without any
/// sockets or clocks. SimServer drives one of these from its tick thread.
class SimCore {
 public:
  explicit SimCore(SimWorld world);

  /// Interprets one datagram. Returns the reply, or nullopt for rc
  /// datagrams (never answered).
  std::optional<std::string> handle(std::string_view datagram);

  /// One internal step using the most recent rc setpoint.
  void advance(double dt);

  const SimWorld& world() const noexcept { return world_; }
  SimWorld& mutable_world() noexcept { return world_; }
  const protocol::RcCommand& setpoint() const noexcept { return setpoint_; }
  std::uint64_t steps() const noexcept { return steps_; }
  std::uint64_t commands_handled() const noexcept { return commands_; }

 private:
  SimWorld world_;
  protocol::RcCommand setpoint_{};
  std::uint64_t steps_ = 0;
  std::uint64_t commands_ = 0;
};

}  // namespace ald::sim
