#pragma once

#include <string>
#include <vector>

#include "sgrbm/rbm.hpp"

namespace sgrbm {

/// Partition of hidden unit indices into non-overlapping groups.
struct Grouping {
  std::vector<int> group_of;              // hidden index -> group id
  std::vector<std::vector<int>> groups;   // group id -> member indices

  /// Contiguous blocks of group_size; the last group is smaller when
  /// group_size does not divide num_hidden.
  static Grouping uniform(Eigen::Index num_hidden, int group_size);

  Eigen::Index num_groups() const { return static_cast<Eigen::Index>(groups.size()); }
  Eigen::Index num_units() const { return static_cast<Eigen::Index>(group_of.size()); }
  bool is_partition() const;
};

enum class RegularizerKind { none, sparse_group, sparse_rbm_baseline };

const char* to_string(RegularizerKind kind);
RegularizerKind regularizer_kind_from_string(const std::string& name);

struct RegularizerConfig {
  RegularizerKind kind = RegularizerKind::none;
  double lambda = 0.1;
  int group_size = 5;          // groups larger than 10 trigger a warning
  double epsilon_norm = 1e-8;  // guard against division by a vanishing group norm

  // sparse_rbm_baseline: squared-error pull of mean activations toward a target.
  // When baseline_target_is_count is set the target is a raw unit count and is
  // normalized by the number of hidden units.
  double baseline_target = 0.05;
  double baseline_weight = 0.02;
  bool baseline_target_is_count = false;

  double effective_baseline_target(Eigen::Index num_hidden) const {
    return baseline_target_is_count ? baseline_target / static_cast<double>(num_hidden)
                                    : baseline_target;
  }
};

/// N_k = sqrt(sum_{m in G_k} probs_m^2), one entry per group.
Vector group_norms(const Vector& probs, const Grouping& grouping);

/// sum_k N_k, the l1 norm over group norms.
double mixed_norm_penalty(const Vector& probs, const Grouping& grouping);

/// Gradient of lambda * mixed_norm_penalty(P(h|x)) with respect to weights and
/// hidden biases, for one data vector. For unit j in group k the weight-column
/// term is lambda * P_j^2 (1 - P_j) / max(N_k, eps) * x and the hidden-bias
/// term is the same scalar; the visible-bias block is zero. The result is
/// meant to be subtracted from the positive phase.
GradientEstimate penalty_gradient(const RbmParams& params, const Vector& visible,
                                  const Grouping& grouping, const RegularizerConfig& config);

/// cd_gradient minus the batch-averaged penalty correction. The negative phase
/// is left untouched. With lambda == 0 this consumes the same rng draws and
/// returns bit-identical results to cd_gradient.
GradientEstimate regularized_cd_gradient(const RbmParams& params, const Matrix& batch,
                                         int cd_steps, const Grouping& grouping,
                                         const RegularizerConfig& config, RngStream& rng);

/// Gradient of weight * sum_j (p - mean_l P(h_j|x_l))^2 with respect to weights
/// and hidden biases, to be subtracted from the positive phase.
GradientEstimate sparse_rbm_baseline_gradient(const RbmParams& params, const Matrix& batch,
                                              double target_p, double weight);

}  // namespace sgrbm
