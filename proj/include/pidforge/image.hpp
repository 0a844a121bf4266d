#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pidforge/types.hpp"

namespace pidforge {

/// 8-bit grayscale raster, row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t& at(int x, int y) {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width && y < height;
  }
  std::span<const std::uint8_t> row(int y) const {
    return {pixels.data() + static_cast<std::size_t>(y) * width,
            static_cast<std::size_t>(width)};
  }
  friend bool operator==(const Image&, const Image&) = default;
};

/// Copies the window [x0, x0+w) x [y0, y0+h); pixels outside the source are
/// filled with `pad`.
Image crop(const Image& src, int x0, int y0, int w, int h, std::uint8_t pad = 255);

/// Deterministic PNG encoding (no timestamps or text chunks).
void write_png(const Image& img, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_png(const Image& img);

/// Reads any PNG and converts it to 8-bit grayscale. Throws DataError.
Image read_png(const std::filesystem::path& path);

}  // namespace pidforge
