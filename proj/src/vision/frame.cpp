#include "ald/vision/frame.hpp"

#include <stdexcept>
#include <string>

namespace ald::vision {

Frame::Frame(int w, int h, Rgb fill) : width(w), height(h) {
  if (w < 0 || h < 0) throw std::invalid_argument("negative frame dimension");
  pixels.resize(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = fill.r;
    pixels[i + 1] = fill.g;
    pixels[i + 2] = fill.b;
  }
}

Frame downscale(const Frame& frame, int factor) {
  if (factor <= 0) throw std::invalid_argument("downscale factor must be positive");
  const int out_w = frame.width / factor;
  const int out_h = frame.height / factor;
  if (out_w == 0 || out_h == 0) {
    throw std::invalid_argument("downscale of " + std::to_string(frame.width) + "x" +
                                std::to_string(frame.height) + " by " + std::to_string(factor) +
                                " has a zero dimension");
  }
  Frame out(out_w, out_h);
  const int block = factor * factor;
  for (int oy = 0; oy < out_h; ++oy) {
    for (int ox = 0; ox < out_w; ++ox) {
      std::array<int, 3> sum{};
      for (int dy = 0; dy < factor; ++dy) {
        const std::size_t row = static_cast<std::size_t>(oy * factor + dy) * frame.width;
        for (int dx = 0; dx < factor; ++dx) {
          const std::size_t i = (row + static_cast<std::size_t>(ox * factor + dx)) * 3;
          sum[0] += frame.pixels[i];
          sum[1] += frame.pixels[i + 1];
          sum[2] += frame.pixels[i + 2];
        }
      }
      out.set(ox, oy,
              {static_cast<std::uint8_t>((sum[0] + block / 2) / block),
               static_cast<std::uint8_t>((sum[1] + block / 2) / block),
               static_cast<std::uint8_t>((sum[2] + block / 2) / block)});
    }
  }
  return out;
}

}  // namespace ald::vision
