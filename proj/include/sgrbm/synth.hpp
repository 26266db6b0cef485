#pragma once

#include <cstdint>

#include "sgrbm/data.hpp"
#include "sgrbm/image.hpp"

namespace sgrbm {

/// Deterministic stand-in corpus for handwritten-digit experiments: stroke
/// glyphs for the ten digit classes rendered onto size x size canvases with
/// random shifts, thickness jitter, intensity jitter, and pixel noise.
/// Values lie in [0, 1]; labels are the digit classes.
Dataset synthetic_digits(int count, int size, std::uint64_t seed);

/// Smooth random texture (sum of random oriented sinusoids), for exercising
/// the patch pipeline. Values span the full 8-bit range.
GrayImage synthetic_texture(int width, int height, std::uint64_t seed);

}  // namespace sgrbm
