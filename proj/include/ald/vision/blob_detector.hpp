#pragma once

#include <functional>
#include <vector>

#include "ald/vision/box.hpp"
#include "ald/vision/frame.hpp"

namespace ald::vision {

/// Anything that turns a frame into candidate boxes. Real CV stacks (cascades,
/// CNNs) plug in here; BlobDetector is the reference implementation.
using Detector = std::function<std::vector<Detection>(const Frame&)>;

struct BlobDetectorParams {
  int luminance_threshold = 64;  // pixels strictly darker than this are foreground
  double merge_gap_ratio = 0.6;  // merge when gap < ratio * wider component width
  int min_pixels = 9;            // noise floor
};

/// Dark connected components (8-connectivity), nearby components merged into
/// one box, largest area first.
class BlobDetector {
 public:
  explicit BlobDetector(BlobDetectorParams params = {});
  std::vector<Detection> operator()(const Frame& frame) const;
  const BlobDetectorParams& params() const noexcept { return params_; }

 private:
  BlobDetectorParams params_;
};

std::vector<Detection> detect_blobs(const Frame& frame, int luminance_threshold = 64);

/// Runs `detector` on a reduced copy and maps boxes back to full resolution.
std::vector<Detection> detect_reduced(const Detector& detector, const Frame& full, int factor = 4);

}  // namespace ald::vision
