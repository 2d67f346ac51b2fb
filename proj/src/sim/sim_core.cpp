#include "ald/sim/sim_core.hpp"

#include <cmath>
#include <variant>

#include "ald/protocol/commands.hpp"

namespace ald::sim {

using protocol::Verb;

SimCore::SimCore(SimWorld world) : world_(std::move(world)) {}

std::optional<std::string> SimCore::handle(std::string_view datagram) {
  ++commands_;
  if (datagram.size() > protocol::kMaxDatagram) return "error";
  const auto parsed = protocol::parse_command(datagram);
  if (!parsed) return "error";

  if (const auto* rc = std::get_if<protocol::RcCommand>(&*parsed)) {
    setpoint_ = *rc;
    return std::nullopt;
  }

  switch (std::get<Verb>(*parsed)) {
    case Verb::Command:
      return "ok";
    case Verb::Takeoff:
      setpoint_ = {};
      return takeoff(world_) ? "ok" : "error";
    case Verb::Land:
      setpoint_ = {};
      land(world_);
      return "ok";
    case Verb::Emergency:
      setpoint_ = {};
      emergency(world_);
      return "ok";
    case Verb::StreamOn:
      world_.streaming = true;
      return "ok";
    case Verb::StreamOff:
      world_.streaming = false;
      return "ok";
    case Verb::BatteryQuery:
      return std::to_string(telemetry_of(world_).battery);
  }
  return "error";
}

void SimCore::advance(double dt) {
  world_ = step(std::move(world_), setpoint_, dt);
  ++steps_;
}

}  // namespace ald::sim
