#include "ald/sim/camera.hpp"

#include <algorithm>
#include <cmath>

namespace ald::sim {

std::optional<ProjectedBox> project_target_exact(const SimWorld& world) {
  const auto& cam = world.params.camera;
  const Vec3 d = world.target.position - world.drone.position;
  const double depth = d.dot(world.drone.forward());
  if (depth <= cam.near_plane) return std::nullopt;
  const double lateral = d.dot(world.drone.right());
  const double down = -d.z();
  ProjectedBox out;
  out.depth = depth;
  out.width = cam.focal * world.target.width_m / depth;
  out.height = cam.focal * world.target.height_m / depth;
  out.u = cam.cx + cam.focal * lateral / depth;
  out.v = cam.cy + cam.focal * down / depth;
  return out;
}

std::optional<vision::BoundingBox> project_target(const SimWorld& world) {
  const auto exact = project_target_exact(world);
  if (!exact) return std::nullopt;
  const double half_w = exact->width / 2.0;
  const double half_h = exact->height / 2.0;
  // std::round is half-away-from-zero.
  const int x0 = static_cast<int>(std::round(exact->u - half_w));
  const int x1 = static_cast<int>(std::round(exact->u + half_w));
  const int y0 = static_cast<int>(std::round(exact->v - half_h));
  const int y1 = static_cast<int>(std::round(exact->v + half_h));
  const vision::BoundingBox box{x0, y0, x1 - x0, y1 - y0};
  if (!box.intersects_image(world.params.camera.width, world.params.camera.height)) {
    return std::nullopt;
  }
  return box;
}

namespace {

void fill_ellipse(vision::Frame& frame, double cx, double cy, double a, double b,
                  vision::Rgb color) {
  if (a <= 0.0 || b <= 0.0) return;
  const int x_lo = std::max(0, static_cast<int>(std::floor(cx - a)));
  const int x_hi = std::min(frame.width - 1, static_cast<int>(std::ceil(cx + a)));
  const int y_lo = std::max(0, static_cast<int>(std::floor(cy - b)));
  const int y_hi = std::min(frame.height - 1, static_cast<int>(std::ceil(cy + b)));
  for (int y = y_lo; y <= y_hi; ++y) {
    const double dy = (y + 0.5 - cy) / b;
    for (int x = x_lo; x <= x_hi; ++x) {
      const double dx = (x + 0.5 - cx) / a;
      if (dx * dx + dy * dy <= 1.0) frame.set(x, y, color);
    }
  }
}

}  // namespace

vision::Frame render_camera(const SimWorld& world) {
  const auto& cam = world.params.camera;
  vision::Frame frame(cam.width, cam.height, kBackground);
  const auto box = project_target(world);
  if (!box) return frame;

  const double eye_w = 0.45 * box->w;
  const double a = eye_w / 2.0;
  const double b = box->h / 2.0;
  const double cy = box->y + b;
  fill_ellipse(frame, box->x + a, cy, a, b, kEyeColor);
  fill_ellipse(frame, box->right() - a, cy, a, b, kEyeColor);
  return frame;
}

}  // namespace ald::sim
