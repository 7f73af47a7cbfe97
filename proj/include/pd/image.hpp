#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pd {

// Row-major grayscale lattice. values[row * width + col] holds the
// observed intensity of pixel (row, col); larger means darker.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  GrayImage() = default;

  GrayImage(int w, int h, double fill = 0.0) : width(w), height(h) {
    if (w <= 0 || h <= 0)
      throw std::invalid_argument("GrayImage: width and height must be positive");
    values.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
  }

  std::size_t pixel_count() const { return values.size(); }

  double& at(int row, int col) {
    return values[static_cast<std::size_t>(row) * width + col];
  }
  double at(int row, int col) const {
    return values[static_cast<std::size_t>(row) * width + col];
  }
};

// Row-major binary lattice. 1 = black (object phase), 0 = white (background).
struct BinaryImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  BinaryImage() = default;

  BinaryImage(int w, int h, std::uint8_t fill = 0) : width(w), height(h) {
    if (w <= 0 || h <= 0)
      throw std::invalid_argument("BinaryImage: width and height must be positive");
    bits.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
  }

  std::size_t pixel_count() const { return bits.size(); }

  std::uint8_t& at(int row, int col) {
    return bits[static_cast<std::size_t>(row) * width + col];
  }
  std::uint8_t at(int row, int col) const {
    return bits[static_cast<std::size_t>(row) * width + col];
  }

  long long black_count() const {
    long long n = 0;
    for (std::uint8_t b : bits) n += b;
    return n;
  }
};

// Interpret a binary truth as a noise-free grayscale image (black = 1.0).
inline GrayImage to_gray(const BinaryImage& img) {
  GrayImage out(img.width, img.height);
  for (std::size_t i = 0; i < img.bits.size(); ++i)
    out.values[i] = img.bits[i] ? 1.0 : 0.0;
  return out;
}

}  // namespace pd
