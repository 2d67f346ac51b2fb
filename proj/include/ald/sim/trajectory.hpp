#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string_view>
#include <variant>
#include <vector>

namespace ald::sim {

struct StaticTarget {
  Eigen::Vector3d position;
};

/// Horizontal circle around `center`, counter-clockwise in world x/y.
struct OrbitTarget {
  Eigen::Vector3d center;
  double radius = 1.0;
  double period = 10.0;  // s
};

/// Piecewise-linear through (t, position) samples; clamps outside the range.
struct WaypointTarget {
  std::vector<std::pair<double, Eigen::Vector3d>> samples;
};

using Trajectory = std::variant<StaticTarget, OrbitTarget, WaypointTarget>;

Eigen::Vector3d evaluate(const Trajectory& trajectory, double t);

/// CSV with columns t,x,y,z; an optional header line is skipped.
WaypointTarget load_waypoints(const std::filesystem::path& csv);

/// "static:x,y,z" | "orbit:r,period[,cx,cy,cz]" | "waypoints:FILE".
Trajectory parse_trajectory(std::string_view spec);

}  // namespace ald::sim
