#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace ald::vision {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
  int luminance() const noexcept { return (int{r} + int{g} + int{b}) / 3; }
};

inline constexpr int kCameraWidth = 840;
inline constexpr int kCameraHeight = 720;

/// Row-major 8-bit RGB image.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  Frame() = default;
  Frame(int w, int h, Rgb fill = {});

  bool empty() const noexcept { return width == 0 || height == 0; }
  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width && y < height;
  }
  Rgb at(int x, int y) const noexcept {
    const auto* p = &pixels[(static_cast<std::size_t>(y) * width + x) * 3];
    return {p[0], p[1], p[2]};
  }
  void set(int x, int y, Rgb c) noexcept {
    auto* p = &pixels[(static_cast<std::size_t>(y) * width + x) * 3];
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
  }

  friend bool operator==(const Frame&, const Frame&) = default;
};

/// Area-averaging reduction by an integer factor. Output dimensions are
/// floor(width/factor) x floor(height/factor); trailing rows and columns that
/// do not fill a whole block are dropped. Each channel average rounds half up.
/// Throws std::invalid_argument when the result would have a zero dimension.
Frame downscale(const Frame& frame, int factor = 4);

}  // namespace ald::vision
