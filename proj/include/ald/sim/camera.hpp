#pragma once

#include <optional>

#include "ald/sim/world.hpp"
#include "ald/vision/box.hpp"
#include "ald/vision/frame.hpp"

namespace ald::sim {

inline constexpr vision::Rgb kBackground{200, 200, 200};
inline constexpr vision::Rgb kEyeColor{30, 30, 30};

/// Real-valued projection of the eye pair before pixel rounding.
struct ProjectedBox {
  double u = 0;      // center, px
  double v = 0;
  double width = 0;  // px
  double height = 0;
  double depth = 0;  // forward distance from the camera, m

  double area() const noexcept { return width * height; }
};

/// Pinhole projection of the target rectangle (always facing the camera).
/// nullopt when the target is at or inside the near plane.
std::optional<ProjectedBox> project_target_exact(const SimWorld& world);

/// Rounded projection: both corners rounded half away from zero. nullopt
/// when behind the near plane, degenerate, or fully outside the image.
std::optional<vision::BoundingBox> project_target(const SimWorld& world);

/// Uniform background with two dark ellipses filling the eye-pair box, one at
/// each end, each 45% of the box width.
vision::Frame render_camera(const SimWorld& world);

}  // namespace ald::sim
