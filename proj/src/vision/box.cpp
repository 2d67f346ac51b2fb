#include "ald/vision/box.hpp"

#include <cmath>
#include <stdexcept>
#include <tuple>

namespace ald::vision {

Detection box_metrics(const BoundingBox& box) {
  if (box.w <= 0 || box.h <= 0) throw std::invalid_argument("degenerate bounding box");
  // w and h are positive so / is floor division.
  return {box, std::int64_t{box.w} * box.h, box.x + box.w / 2, box.y + box.h / 2};
}

Observation best_candidate(std::span<const Detection> detections) {
  Observation best{};
  bool any = false;
  for (const auto& d : detections) {
    const Observation candidate{d.area, d.cx, d.cy};
    if (!any || candidate > best) {
      best = candidate;
      any = true;
    }
  }
  return best;
}

BoundingBox upscale_box(const BoundingBox& box, int factor) {
  return {box.x * factor, box.y * factor, box.w * factor, box.h * factor};
}

BoundingBox downscale_box(const BoundingBox& box, int factor) {
  const auto scale = [factor](int v) {
    return static_cast<int>(std::round(static_cast<double>(v) / factor));
  };
  const int x0 = scale(box.x);
  const int y0 = scale(box.y);
  return {x0, y0, scale(box.right()) - x0, scale(box.bottom()) - y0};
}

}  // namespace ald::vision
