#pragma once

#include <cstdint>

#include "sgrbm/rng.hpp"
#include "sgrbm/types.hpp"

namespace sgrbm {

/// E(x, h) for binary visibles:
///   -sum_ij x_i h_j w_ij - sum_i x_i b_i - sum_j h_j c_j
/// Gaussian visibles replace the -x.b term with 0.5 * sum_i (x_i - b_i)^2.
double energy(const RbmParams& params, const Vector& visible, const Vector& hidden);

/// P(h_j = 1 | x) = sigmoid(x.w_j + c_j), identical for both visible types.
Vector hidden_probabilities(const RbmParams& params, const Vector& visible);
/// Row-wise batch version; batch is L x V, result is L x H.
Matrix hidden_probabilities(const RbmParams& params, const Matrix& batch);

/// Binary type: P(x_i = 1 | h). Gaussian type: the conditional mean w_i.h + b_i.
Vector visible_probabilities(const RbmParams& params, const Vector& hidden);
Matrix visible_probabilities(const RbmParams& params, const Matrix& hidden_batch);

/// -log sum_h exp(-E(x, h)), in closed form over the hidden units.
double free_energy(const RbmParams& params, const Vector& visible);
Vector free_energies(const RbmParams& params, const Matrix& batch);

/// One block Gibbs update: h ~ P(h|x), then x' ~ P(x'|h). The returned state
/// carries the probabilities h was sampled from.
GibbsState gibbs_step(const RbmParams& params, const GibbsState& state, RngStream& rng);

/// CD-k gradient of the mean data log-likelihood. Positive phase uses
/// P(h|x) against the data; the negative phase reconstructs for k steps
/// (sampled states) and uses P(h|x-) probabilities on the final hidden pass.
GradientEstimate cd_gradient(const RbmParams& params, const Matrix& batch, int cd_steps,
                             RngStream& rng);

struct TrainConfig {
  double learning_rate = 0.05;
  double momentum = 0.5;  // effective momentum for the current epoch
  double momentum_initial = 0.5;
  double momentum_final = 0.9;
  int momentum_switch_epoch = 5;  // epochs trained with momentum_initial
  double weight_decay = 2e-4;
  int cd_steps = 1;
  int epochs = 10;
  int batch_size = 100;
  double weight_init_sigma = 0.01;
  std::uint64_t seed = 0;
  int save_interval = 0;  // epochs between periodic checkpoints; 0 = only final

  double momentum_for_epoch(int epoch) const {
    return epoch <= momentum_switch_epoch ? momentum_initial : momentum_final;
  }
};

struct OptimizerState {
  Matrix vel_weights;
  Vector vel_visible_bias;
  Vector vel_hidden_bias;

  static OptimizerState zeros(Eigen::Index num_visible, Eigen::Index num_hidden);
  bool all_finite() const;
};

/// Momentum SGD ascent step. Order: momentum accumulate, then weight decay,
/// then apply:
///   vel     <- momentum * vel + grad
///   params  <- params + lr * (vel - weight_decay * weights)
/// Weight decay touches the weight matrix only, never the biases.
/// Throws NumericError if the update produces non-finite parameters.
void apply_update(RbmParams& params, const GradientEstimate& grad, OptimizerState& opt,
                  const TrainConfig& config);

/// Fresh parameters: weights ~ N(0, sigma^2), biases zero.
RbmParams init_rbm(Eigen::Index num_visible, Eigen::Index num_hidden, VisibleType type,
                   double weight_sigma, RngStream& rng);

/// Data-dependent visible bias init. Binary: logit of per-pixel means clamped
/// to [-4, 4]. Gaussian: the per-dimension means themselves.
void init_visible_bias_from_means(RbmParams& params, const Vector& per_dim_means);

}  // namespace sgrbm
