#include "ald/vision/blob_detector.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace ald::vision {

namespace {

struct Component {
  int x0, y0, x1, y1;  // inclusive pixel extent
  int pixels;
};

int gap_between(const Component& a, const Component& b) {
  const int hgap = std::max(0, std::max(a.x0, b.x0) - std::min(a.x1, b.x1) - 1);
  const int vgap = std::max(0, std::max(a.y0, b.y0) - std::min(a.y1, b.y1) - 1);
  return std::max(hgap, vgap);
}

std::vector<Component> label_components(const Frame& frame, int threshold, int min_pixels) {
  const int w = frame.width;
  const int h = frame.height;
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      mask[static_cast<std::size_t>(y) * w + x] = frame.at(x, y).luminance() < threshold;
    }
  }

  std::vector<Component> out;
  std::vector<int> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t start = static_cast<std::size_t>(y) * w + x;
      if (!mask[start]) continue;
      mask[start] = 0;
      Component c{x, y, x, y, 0};
      stack.assign(1, static_cast<int>(start));
      while (!stack.empty()) {
        const int idx = stack.back();
        stack.pop_back();
        const int px = idx % w;
        const int py = idx / w;
        ++c.pixels;
        c.x0 = std::min(c.x0, px);
        c.x1 = std::max(c.x1, px);
        c.y0 = std::min(c.y0, py);
        c.y1 = std::max(c.y1, py);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = px + dx;
            const int ny = py + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t n = static_cast<std::size_t>(ny) * w + nx;
            if (mask[n]) {
              mask[n] = 0;
              stack.push_back(static_cast<int>(n));
            }
          }
        }
      }
      if (c.pixels >= min_pixels) out.push_back(c);
    }
  }
  return out;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

BlobDetector::BlobDetector(BlobDetectorParams params) : params_(params) {
  if (params_.luminance_threshold <= 0 || params_.luminance_threshold >= 255) {
    throw std::invalid_argument("luminance threshold must lie in (0, 255)");
  }
}

std::vector<Detection> BlobDetector::operator()(const Frame& frame) const {
  const auto components =
      label_components(frame, params_.luminance_threshold, params_.min_pixels);

  std::vector<std::size_t> parent(components.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (std::size_t i = 0; i < components.size(); ++i) {
    for (std::size_t j = i + 1; j < components.size(); ++j) {
      const int widest = std::max(components[i].x1 - components[i].x0 + 1,
                                  components[j].x1 - components[j].x0 + 1);
      if (gap_between(components[i], components[j]) < params_.merge_gap_ratio * widest) {
        parent[find_root(parent, i)] = find_root(parent, j);
      }
    }
  }

  std::vector<std::optional<Component>> groups(components.size());
  for (std::size_t i = 0; i < components.size(); ++i) {
    auto& g = groups[find_root(parent, i)];
    const auto& c = components[i];
    if (!g) {
      g = c;
    } else {
      g->x0 = std::min(g->x0, c.x0);
      g->y0 = std::min(g->y0, c.y0);
      g->x1 = std::max(g->x1, c.x1);
      g->y1 = std::max(g->y1, c.y1);
      g->pixels += c.pixels;
    }
  }

  std::vector<Detection> out;
  for (const auto& g : groups) {
    if (!g) continue;
    out.push_back(box_metrics({g->x0, g->y0, g->x1 - g->x0 + 1, g->y1 - g->y0 + 1}));
  }
  std::sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
    return Observation{a.area, a.cx, a.cy} > Observation{b.area, b.cx, b.cy};
  });
  return out;
}

std::vector<Detection> detect_blobs(const Frame& frame, int luminance_threshold) {
  BlobDetectorParams params;
  params.luminance_threshold = luminance_threshold;
  return BlobDetector(params)(frame);
}

std::vector<Detection> detect_reduced(const Detector& detector, const Frame& full, int factor) {
  const Frame small = downscale(full, factor);
  std::vector<Detection> out;
  for (const auto& d : detector(small)) out.push_back(box_metrics(upscale_box(d.box, factor)));
  return out;
}

}  // namespace ald::vision
