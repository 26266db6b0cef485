#include "sgrbm/synth.hpp"

#include <array>
#include <cmath>

namespace sgrbm {

namespace {

struct Segment {
  double x1, y1, x2, y2;
};

// Stroke skeletons on the unit square, y pointing down.
const std::array<std::vector<Segment>, 10> kGlyphs = {{
    // 0: ring
    {{0.28, 0.18, 0.72, 0.18}, {0.72, 0.18, 0.72, 0.84}, {0.72, 0.84, 0.28, 0.84},
     {0.28, 0.84, 0.28, 0.18}},
    // 1: vertical with flag
    {{0.40, 0.30, 0.56, 0.16}, {0.56, 0.16, 0.56, 0.86}},
    // 2
    {{0.26, 0.22, 0.72, 0.20}, {0.72, 0.20, 0.72, 0.46}, {0.72, 0.46, 0.26, 0.84},
     {0.26, 0.84, 0.76, 0.84}},
    // 3
    {{0.26, 0.18, 0.72, 0.18}, {0.72, 0.18, 0.72, 0.50}, {0.42, 0.50, 0.72, 0.50},
     {0.72, 0.50, 0.72, 0.84}, {0.26, 0.84, 0.72, 0.84}},
    // 4
    {{0.32, 0.16, 0.24, 0.56}, {0.24, 0.56, 0.78, 0.56}, {0.64, 0.16, 0.64, 0.88}},
    // 5
    {{0.72, 0.16, 0.27, 0.16}, {0.27, 0.16, 0.27, 0.50}, {0.27, 0.50, 0.70, 0.50},
     {0.70, 0.50, 0.70, 0.84}, {0.70, 0.84, 0.26, 0.84}},
    // 6
    {{0.62, 0.16, 0.30, 0.20}, {0.30, 0.20, 0.28, 0.84}, {0.28, 0.84, 0.72, 0.84},
     {0.72, 0.84, 0.72, 0.52}, {0.72, 0.52, 0.28, 0.50}},
    // 7
    {{0.24, 0.18, 0.76, 0.18}, {0.76, 0.18, 0.42, 0.86}},
    // 8
    {{0.28, 0.16, 0.72, 0.16}, {0.72, 0.16, 0.72, 0.84}, {0.72, 0.84, 0.28, 0.84},
     {0.28, 0.84, 0.28, 0.16}, {0.28, 0.50, 0.72, 0.50}},
    // 9
    {{0.70, 0.52, 0.30, 0.50}, {0.30, 0.50, 0.30, 0.16}, {0.30, 0.16, 0.70, 0.16},
     {0.70, 0.16, 0.70, 0.84}, {0.70, 0.84, 0.34, 0.88}},
}};

double segment_distance(double px, double py, const Segment& s) {
  const double dx = s.x2 - s.x1;
  const double dy = s.y2 - s.y1;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((px - s.x1) * dx + (py - s.y1) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double cx = s.x1 + t * dx;
  const double cy = s.y1 + t * dy;
  return std::hypot(px - cx, py - cy);
}

}  // namespace

Dataset synthetic_digits(int count, int size, std::uint64_t seed) {
  Dataset dataset;
  dataset.items.resize(count, static_cast<Eigen::Index>(size) * size);
  dataset.labels.resize(static_cast<std::size_t>(count));
  dataset.meta.source = "synthetic-digits";
  dataset.meta.rows = size;
  dataset.meta.cols = size;
  dataset.meta.preprocessing = "none";

  for (int n = 0; n < count; ++n) {
    RngStream rng = RngStream::derive(seed, {static_cast<std::uint64_t>(n)});
    const int digit = n % 10;
    dataset.labels[static_cast<std::size_t>(n)] = digit;

    const double shift_x = (rng.uniform() - 0.5) * 0.24;
    const double shift_y = (rng.uniform() - 0.5) * 0.24;
    const double scale = 0.85 + 0.25 * rng.uniform();
    const double half_width = 0.06 + 0.035 * rng.uniform();
    const double intensity = 0.75 + 0.25 * rng.uniform();
    const auto& glyph = kGlyphs[static_cast<std::size_t>(digit)];

    for (int r = 0; r < size; ++r) {
      for (int c = 0; c < size; ++c) {
        const double px = ((c + 0.5) / size - 0.5 - shift_x) / scale + 0.5;
        const double py = ((r + 0.5) / size - 0.5 - shift_y) / scale + 0.5;
        double dist = 1e9;
        for (const auto& segment : glyph) {
          dist = std::min(dist, segment_distance(px, py, segment));
        }
        const double ratio = dist / half_width;
        double value = ratio < 1.0 ? intensity * (1.0 - ratio * ratio) : 0.0;
        value += 0.04 * rng.gaussian();
        dataset.items(n, static_cast<Eigen::Index>(r) * size + c) = std::clamp(value, 0.0, 1.0);
      }
    }
  }
  return dataset;
}

GrayImage synthetic_texture(int width, int height, std::uint64_t seed) {
  RngStream rng = RngStream::derive(seed, {0});
  constexpr int kWaves = 12;
  std::array<double, kWaves> freq, angle, phase, amp;
  for (int k = 0; k < kWaves; ++k) {
    freq[static_cast<std::size_t>(k)] = 2.0 * std::pow(12.0, rng.uniform());  // 2 .. 24 cycles
    angle[static_cast<std::size_t>(k)] = rng.uniform() * M_PI;
    phase[static_cast<std::size_t>(k)] = rng.uniform() * 2.0 * M_PI;
    amp[static_cast<std::size_t>(k)] = 1.0 / std::pow(freq[static_cast<std::size_t>(k)], 0.8);
  }

  std::vector<double> values(static_cast<std::size_t>(width) * height);
  double lo = 1e30, hi = -1e30;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      double v = 0.0;
      for (int k = 0; k < kWaves; ++k) {
        const auto i = static_cast<std::size_t>(k);
        const double u = (c * std::cos(angle[i]) + r * std::sin(angle[i])) / width;
        v += amp[i] * std::sin(2.0 * M_PI * freq[i] * u + phase[i]);
      }
      values[static_cast<std::size_t>(r) * width + c] = v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }

  GrayImage image;
  image.width = width;
  image.height = height;
  image.pixels.resize(values.size());
  const double span = hi > lo ? hi - lo : 1.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    image.pixels[i] = static_cast<std::uint8_t>(std::lround((values[i] - lo) / span * 255.0));
  }
  return image;
}

}  // namespace sgrbm
