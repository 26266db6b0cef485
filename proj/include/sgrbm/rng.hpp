#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>

#include "sgrbm/math.hpp"

namespace sgrbm {

/// Mixes a master seed with a path of indices into a fresh seed. Distinct
/// paths give statistically independent streams.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// Deterministic random stream. All sampling in the library goes through this
/// class instead of std distributions so that exact draw sequences are stable
/// across standard library implementations.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  /// Derives an independent stream from a master seed and a path of indices.
  /// The same (master, path) always yields the same stream, and streams with
  /// different paths do not perturb each other.
  static RngStream derive(std::uint64_t master, std::initializer_list<std::uint64_t> path);

  std::uint64_t bits();
  /// Uniform draw in [0, 1) with 53 bits of mantissa.
  double uniform();
  /// Standard normal via Box-Muller; consumes two uniforms per call.
  double gaussian();
  /// Unbiased integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound);
  bool bernoulli(double p) { return uniform() < p; }

  std::string save_state() const;
  void restore_state(const std::string& state);

 private:
  std::mt19937_64 engine_;
};

/// Elementwise Bernoulli samples (0.0 / 1.0), consuming draws row by row.
Matrix sample_bernoulli(const Matrix& probs, RngStream& rng);
Vector sample_bernoulli(const Vector& probs, RngStream& rng);

/// means + unit-variance Gaussian noise, consuming draws row by row.
Matrix add_unit_gaussian(const Matrix& means, RngStream& rng);
Vector add_unit_gaussian(const Vector& means, RngStream& rng);

}  // namespace sgrbm
