#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <random>

#include "ald/protocol/rc_command.hpp"
#include "ald/protocol/telemetry.hpp"
#include "ald/sim/trajectory.hpp"

namespace ald::sim {

using Vec3 = Eigen::Vector3d;

/// World frame: x, y horizontal, z up. Heading is measured clockwise seen
/// from above, so a positive rc yaw (turn right) increases it.
struct Pose {
  Vec3 position = Vec3::Zero();
  double heading = 0.0;  // radians, (-pi, pi]

  Vec3 forward() const;
  Vec3 right() const;
};

double normalize_angle(double radians);

struct EyePair {
  Vec3 position = Vec3::Zero();
  double width_m = 0.12;
  double height_m = 0.05;
};

/// Per-axis velocity noise standard deviation in m/s.
struct NoiseModel {
  double horizontal_std = 0.0;
  double vertical_std = 0.0;

  static NoiseModel off() { return {}; }
  /// Vertical is twice the horizontal.
  static NoiseModel with_horizontal(double std) { return {std, 2.0 * std}; }
};

struct FlightLimits {
  double vmax_horizontal = 1.0;  // m/s, right and forward axes
  double vmax_vertical = 0.7;    // m/s
  double yaw_rate_max = 1.5;     // rad/s
  double lag_tau = 0.0;          // s; 0 disables the first-order velocity lag
  double takeoff_height = 0.8;   // m
};

struct ThermalModel {
  double flying_rate = 0.5;       // units/s
  double idle_stream_rate = 0.1;  // units/s
  double warning = 90.0;
  double shutdown = 95.0;
  double initial = 72.0;
};

struct BatteryModel {
  double flying_drain = 0.2;  // %/s
  double idle_drain = 0.02;   // %/s
  double takeoff_minimum = 10.0;
};

struct CameraIntrinsics {
  int width = 840;
  int height = 720;
  double focal = 900.0;  // px
  double cx = 420.0;
  double cy = 360.0;
  double near_plane = 0.1;  // m
};

struct SimParams {
  FlightLimits limits;
  ThermalModel thermal;
  BatteryModel battery;
  CameraIntrinsics camera;
};

struct SimWorld {
  Pose drone;
  Vec3 velocity = Vec3::Zero();  // world frame, m/s
  double yaw_rate = 0.0;         // rad/s
  bool flying = false;
  bool streaming = false;
  bool shutdown = false;
  EyePair target;
  double battery = 100.0;
  double temperature = 72.0;
  double time = 0.0;
  double flight_time = 0.0;
  NoiseModel noise;
  std::uint64_t rng_seed = 0;
  std::mt19937_64 rng;
  SimParams params;
  std::shared_ptr<const Trajectory> trajectory;  // moves the target when set
};

/// Fresh landed world at the origin facing +x.
SimWorld make_world(std::uint64_t seed, NoiseModel noise = {}, SimParams params = {});

/// Advances the world by dt under a held rc setpoint. Shutdown worlds are
/// returned unchanged.
SimWorld step(SimWorld world, const protocol::RcCommand& rc, double dt);

/// Returns false (and leaves the world alone) when shut down or the battery
/// is under the takeoff minimum.
bool takeoff(SimWorld& world);
void land(SimWorld& world);
/// Motors off immediately: zero velocity, drop to the floor.
void emergency(SimWorld& world);

protocol::Telemetry telemetry_of(const SimWorld& world);

}  // namespace ald::sim
