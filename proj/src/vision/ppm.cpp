#include "ald/vision/ppm.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace ald::vision {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  int integer() {
    skip_space_and_comments();
    int value = 0;
    auto [ptr, ec] = std::from_chars(bytes_.data() + pos_, bytes_.data() + bytes_.size(), value);
    if (ec != std::errc{}) throw std::runtime_error("ppm: bad header integer");
    pos_ = static_cast<std::size_t>(ptr - bytes_.data());
    return value;
  }

  std::size_t& pos() { return pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_ppm(const Frame& frame) {
  std::string out = "P6\n" + std::to_string(frame.width) + " " + std::to_string(frame.height) +
                    "\n255\n";
  out.append(reinterpret_cast<const char*>(frame.pixels.data()), frame.pixels.size());
  return out;
}

Frame decode_ppm(std::string_view bytes) {
  if (bytes.substr(0, 2) != "P6") throw std::runtime_error("ppm: not a P6 file");
  HeaderReader reader(bytes.substr(2));
  const int w = reader.integer();
  const int h = reader.integer();
  const int maxval = reader.integer();
  if (w <= 0 || h <= 0 || maxval != 255) throw std::runtime_error("ppm: unsupported header");
  // Exactly one whitespace byte separates the header from the raster.
  const std::size_t start = 2 + reader.pos() + 1;
  const std::size_t need = static_cast<std::size_t>(w) * h * 3;
  if (bytes.size() < start + need) throw std::runtime_error("ppm: truncated raster");
  Frame frame(w, h);
  std::copy_n(bytes.data() + start, need, reinterpret_cast<char*>(frame.pixels.data()));
  return frame;
}

void write_ppm(const std::filesystem::path& path, const Frame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const std::string bytes = encode_ppm(frame);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Frame read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return decode_ppm(bytes);
}

}  // namespace ald::vision
