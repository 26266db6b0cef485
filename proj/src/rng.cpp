#include "sgrbm/rng.hpp"

#include <cmath>
#include <sstream>

#include "sgrbm/errors.hpp"

namespace sgrbm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(master);
  for (std::uint64_t index : path) {
    s = splitmix64(s ^ splitmix64(index + 0x9E3779B97F4A7C15ULL));
  }
  return s;
}

RngStream::RngStream(std::uint64_t seed) : engine_(seed) {}

RngStream RngStream::derive(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  return RngStream(derive_seed(master, path));
}

std::uint64_t RngStream::bits() { return engine_(); }

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::gaussian() {
  // Box-Muller, pair member discarded so no state beyond the engine survives.
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log1p(-u1));
  return r * std::cos(2.0 * M_PI * u2);
}

std::uint64_t RngStream::below(std::uint64_t bound) {
  if (bound == 0) throw ParameterError("RngStream::below: bound must be positive");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw;
  do {
    draw = engine_();
  } while (draw >= limit);
  return draw % bound;
}

std::string RngStream::save_state() const {
  std::ostringstream out;
  out << engine_;
  return out.str();
}

void RngStream::restore_state(const std::string& state) {
  std::istringstream in(state);
  in >> engine_;
  if (in.fail()) throw ParseError("invalid rng state string");
}

Matrix sample_bernoulli(const Matrix& probs, RngStream& rng) {
  Matrix out(probs.rows(), probs.cols());
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    for (Eigen::Index c = 0; c < probs.cols(); ++c) {
      out(r, c) = rng.uniform() < probs(r, c) ? 1.0 : 0.0;
    }
  }
  return out;
}

Vector sample_bernoulli(const Vector& probs, RngStream& rng) {
  Vector out(probs.size());
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    out[i] = rng.uniform() < probs[i] ? 1.0 : 0.0;
  }
  return out;
}

Matrix add_unit_gaussian(const Matrix& means, RngStream& rng) {
  Matrix out(means.rows(), means.cols());
  for (Eigen::Index r = 0; r < means.rows(); ++r) {
    for (Eigen::Index c = 0; c < means.cols(); ++c) {
      out(r, c) = means(r, c) + rng.gaussian();
    }
  }
  return out;
}

Vector add_unit_gaussian(const Vector& means, RngStream& rng) {
  Vector out(means.size());
  for (Eigen::Index i = 0; i < means.size(); ++i) {
    out[i] = means[i] + rng.gaussian();
  }
  return out;
}

}  // namespace sgrbm
