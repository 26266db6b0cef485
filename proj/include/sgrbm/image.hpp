#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sgrbm {

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  std::uint8_t at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
};

/// 8-bit binary PGM (P5). Comments and arbitrary whitespace in the header are
/// accepted; maxval must be 255.
GrayImage read_pgm(const std::string& path);
void write_pgm(const std::string& path, const GrayImage& image);

}  // namespace sgrbm
