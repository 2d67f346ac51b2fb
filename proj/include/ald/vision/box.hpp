#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ald::vision {

/// Pixel rectangle with corners (x, y) and (x + w, y + h); origin top-left,
/// y grows downward.
struct BoundingBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  int right() const noexcept { return x + w; }
  int bottom() const noexcept { return y + h; }
  bool intersects_image(int width, int height) const noexcept {
    return w > 0 && h > 0 && right() > 0 && bottom() > 0 && x < width && y < height;
  }
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Detection {
  BoundingBox box;
  std::int64_t area = 0;
  int cx = 0;
  int cy = 0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// The triple the follow controller consumes. All zero means no detection.
struct Observation {
  std::int64_t area = 0;
  int cx = 0;
  int cy = 0;

  bool lost() const noexcept { return area == 0 && cx == 0 && cy == 0; }
  friend auto operator<=>(const Observation&, const Observation&) = default;
};

/// Area w*h and center (x + w/2, y + h/2) with floor division.
/// Throws std::invalid_argument for w <= 0 or h <= 0.
Detection box_metrics(const BoundingBox& box);

/// Largest (area, cx, cy) tuple, or all-zero for no candidates.
Observation best_candidate(std::span<const Detection> detections);

BoundingBox upscale_box(const BoundingBox& box, int factor = 4);

/// Maps a full-resolution box to a reduced image by rounding both corners.
/// May yield w or h of zero for boxes smaller than the factor.
BoundingBox downscale_box(const BoundingBox& box, int factor = 4);

}  // namespace ald::vision
