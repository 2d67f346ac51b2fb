#include "ald/sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ald::sim {

Vec3 Pose::forward() const { return {std::cos(heading), -std::sin(heading), 0.0}; }

Vec3 Pose::right() const { return {-std::sin(heading), -std::cos(heading), 0.0}; }

double normalize_angle(double radians) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(radians, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

SimWorld make_world(std::uint64_t seed, NoiseModel noise, SimParams params) {
  SimWorld world;
  world.noise = noise;
  world.rng_seed = seed;
  world.rng.seed(seed);
  world.params = params;
  world.temperature = params.thermal.initial;
  world.target.position = Vec3(2.0, 0.0, params.limits.takeoff_height);
  return world;
}

namespace {

void cut_motors(SimWorld& world) {
  world.flying = false;
  world.velocity.setZero();
  world.yaw_rate = 0.0;
  world.drone.position.z() = 0.0;
}

}  // namespace

SimWorld step(SimWorld world, const protocol::RcCommand& rc, double dt) {
  if (world.shutdown) return world;
  protocol::validate(rc);
  const auto& limits = world.params.limits;

  if (world.flying) {
    const Vec3 commanded = world.drone.forward() * (rc.forward / 100.0 * limits.vmax_horizontal) +
                           world.drone.right() * (rc.right / 100.0 * limits.vmax_horizontal) +
                           Vec3::UnitZ() * (rc.upward / 100.0 * limits.vmax_vertical);
    const double commanded_yaw = rc.yaw / 100.0 * limits.yaw_rate_max;
    if (limits.lag_tau > 0.0) {
      const double alpha = 1.0 - std::exp(-dt / limits.lag_tau);
      world.velocity += (commanded - world.velocity) * alpha;
      world.yaw_rate += (commanded_yaw - world.yaw_rate) * alpha;
    } else {
      world.velocity = commanded;
      world.yaw_rate = commanded_yaw;
    }

    Vec3 drift = Vec3::Zero();
    if (world.noise.horizontal_std > 0.0 || world.noise.vertical_std > 0.0) {
      std::normal_distribution<double> unit(0.0, 1.0);
      drift.x() = world.noise.horizontal_std * unit(world.rng);
      drift.y() = world.noise.horizontal_std * unit(world.rng);
      drift.z() = world.noise.vertical_std * unit(world.rng);
    }
    world.drone.position += (world.velocity + drift) * dt;
    world.drone.position.z() = std::max(0.0, world.drone.position.z());
    world.drone.heading = normalize_angle(world.drone.heading + world.yaw_rate * dt);

    world.temperature += world.params.thermal.flying_rate * dt;
    world.battery -= world.params.battery.flying_drain * dt;
    world.flight_time += dt;
  } else {
    world.velocity.setZero();
    world.yaw_rate = 0.0;
    if (world.streaming) world.temperature += world.params.thermal.idle_stream_rate * dt;
    world.battery -= world.params.battery.idle_drain * dt;
  }

  world.battery = std::max(0.0, world.battery);
  if (world.battery <= 0.0 && world.flying) land(world);
  if (world.temperature >= world.params.thermal.shutdown) {
    world.shutdown = true;
    cut_motors(world);
  }

  world.time += dt;
  if (world.trajectory) world.target.position = evaluate(*world.trajectory, world.time);
  return world;
}

bool takeoff(SimWorld& world) {
  if (world.shutdown || world.battery < world.params.battery.takeoff_minimum) return false;
  if (!world.flying) {
    world.flying = true;
    world.drone.position.z() =
        std::max(world.drone.position.z(), world.params.limits.takeoff_height);
  }
  return true;
}

void land(SimWorld& world) { cut_motors(world); }

void emergency(SimWorld& world) { cut_motors(world); }

protocol::Telemetry telemetry_of(const SimWorld& world) {
  const auto& limits = world.params.limits;
  const double v_forward = world.velocity.dot(world.drone.forward());
  const double v_right = world.velocity.dot(world.drone.right());
  protocol::Telemetry t;
  // Nose dips when flying forward.
  t.pitch = -static_cast<int>(std::lround(10.0 * v_forward / limits.vmax_horizontal));
  t.roll = static_cast<int>(std::lround(10.0 * v_right / limits.vmax_horizontal));
  t.yaw_deg = static_cast<int>(std::lround(world.drone.heading * 180.0 / std::numbers::pi));
  t.height = static_cast<int>(std::lround(world.drone.position.z() * 100.0));
  t.battery = std::clamp(static_cast<int>(std::floor(world.battery)), 0, 100);
  t.temp_high = static_cast<int>(std::floor(world.temperature));
  t.temp_low = t.temp_high - 2;
  t.flight_time = static_cast<int>(std::floor(world.flight_time));
  return t;
}

}  // namespace ald::sim
