// Test-only oracles, deliberately independent of the library's enumeration
// and gradient paths: plain sums over every joint (x, h) configuration.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "sgrbm/rbm.hpp"

namespace sgrbm::testing {

inline Vector bits_to_vector(std::uint64_t bits, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = (bits >> i) & 1ULL ? 1.0 : 0.0;
  return v;
}

// Sums exp(-E) over all 2^(V+H) joint configurations via the energy function.
inline double naive_partition(const RbmParams& params) {
  const auto v = params.num_visible();
  const auto h = params.num_hidden();
  double z = 0.0;
  for (std::uint64_t xb = 0; xb < (1ULL << v); ++xb) {
    const Vector x = bits_to_vector(xb, v);
    for (std::uint64_t hb = 0; hb < (1ULL << h); ++hb) {
      z += std::exp(-energy(params, x, bits_to_vector(hb, h)));
    }
  }
  return z;
}

// P(x) for one visible configuration, by the same joint sum.
inline double naive_visible_marginal(const RbmParams& params, const Vector& x) {
  const auto h = params.num_hidden();
  double unnorm = 0.0;
  for (std::uint64_t hb = 0; hb < (1ULL << h); ++hb) {
    unnorm += std::exp(-energy(params, x, bits_to_vector(hb, h)));
  }
  return unnorm / naive_partition(params);
}

// E[h_j | x] by enumerating hidden configurations.
inline Vector naive_hidden_conditional_mean(const RbmParams& params, const Vector& x) {
  const auto h = params.num_hidden();
  Vector numer = Vector::Zero(h);
  double denom = 0.0;
  for (std::uint64_t hb = 0; hb < (1ULL << h); ++hb) {
    const Vector hidden = bits_to_vector(hb, h);
    const double w = std::exp(-energy(params, x, hidden));
    numer += w * hidden;
    denom += w;
  }
  return numer / denom;
}

// P(x_i = 1 | h) by enumerating the two states of unit i with the rest fixed.
inline double naive_visible_conditional(const RbmParams& params, Eigen::Index i, Vector x,
                                        const Vector& hidden) {
  x[i] = 1.0;
  const double on = std::exp(-energy(params, x, hidden));
  x[i] = 0.0;
  const double off = std::exp(-energy(params, x, hidden));
  return on / (on + off);
}

// mean over the batch of log P(x), by the joint sum.
inline double naive_mean_log_likelihood(const RbmParams& params, const Matrix& batch) {
  double total = 0.0;
  for (Eigen::Index l = 0; l < batch.rows(); ++l) {
    total += std::log(naive_visible_marginal(params, batch.row(l).transpose()));
  }
  return total / static_cast<double>(batch.rows());
}

// Centered finite differences of a scalar function of the parameters, taken
// independently for every weight and bias entry.
struct FdGradient {
  Matrix d_weights;
  Vector d_visible_bias;
  Vector d_hidden_bias;
};

inline FdGradient finite_difference_gradient(const RbmParams& params,
                                             const std::function<double(const RbmParams&)>& f,
                                             double step = 1e-5) {
  FdGradient grad;
  grad.d_weights.resize(params.num_visible(), params.num_hidden());
  grad.d_visible_bias.resize(params.num_visible());
  grad.d_hidden_bias.resize(params.num_hidden());

  RbmParams probe = params;
  for (Eigen::Index i = 0; i < params.num_visible(); ++i) {
    for (Eigen::Index j = 0; j < params.num_hidden(); ++j) {
      probe.weights(i, j) = params.weights(i, j) + step;
      const double up = f(probe);
      probe.weights(i, j) = params.weights(i, j) - step;
      const double down = f(probe);
      probe.weights(i, j) = params.weights(i, j);
      grad.d_weights(i, j) = (up - down) / (2.0 * step);
    }
  }
  for (Eigen::Index i = 0; i < params.num_visible(); ++i) {
    probe.visible_bias[i] = params.visible_bias[i] + step;
    const double up = f(probe);
    probe.visible_bias[i] = params.visible_bias[i] - step;
    const double down = f(probe);
    probe.visible_bias[i] = params.visible_bias[i];
    grad.d_visible_bias[i] = (up - down) / (2.0 * step);
  }
  for (Eigen::Index j = 0; j < params.num_hidden(); ++j) {
    probe.hidden_bias[j] = params.hidden_bias[j] + step;
    const double up = f(probe);
    probe.hidden_bias[j] = params.hidden_bias[j] - step;
    const double down = f(probe);
    probe.hidden_bias[j] = params.hidden_bias[j];
    grad.d_hidden_bias[j] = (up - down) / (2.0 * step);
  }
  return grad;
}

// Random test model with weights/biases on a controllable scale.
inline RbmParams random_rbm(Eigen::Index v, Eigen::Index h, double scale, RngStream& rng,
                            VisibleType type = VisibleType::binary) {
  RbmParams params = zero_rbm(v, h, type);
  for (Eigen::Index i = 0; i < v; ++i)
    for (Eigen::Index j = 0; j < h; ++j) params.weights(i, j) = scale * rng.gaussian();
  for (Eigen::Index i = 0; i < v; ++i) params.visible_bias[i] = 0.5 * scale * rng.gaussian();
  for (Eigen::Index j = 0; j < h; ++j) params.hidden_bias[j] = 0.5 * scale * rng.gaussian();
  return params;
}

inline Matrix random_binary_batch(Eigen::Index rows, Eigen::Index cols, RngStream& rng) {
  return sample_bernoulli(Matrix::Constant(rows, cols, 0.5), rng);
}

}  // namespace sgrbm::testing
