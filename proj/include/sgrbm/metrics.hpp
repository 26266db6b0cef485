#pragma once

#include <cstdint>
#include <vector>

#include "sgrbm/regularizer.hpp"

namespace sgrbm {

/// log Z by exhaustive enumeration of the smaller layer, using the closed-form
/// sum over the other layer. Binary visibles only; refuses models with
/// V + H > 24.
double exact_log_partition(const RbmParams& params);
/// The two enumeration routes, exposed so they can be checked against each other.
double exact_log_partition_over_hidden(const RbmParams& params);
double exact_log_partition_over_visible(const RbmParams& params);

/// Exact model expectations of the sufficient statistics, by enumeration.
struct ModelExpectations {
  Matrix visible_hidden;  // E[x h^T], V x H
  Vector visible;         // E[x]
  Vector hidden;          // E[h]
};
ModelExpectations exact_model_expectations(const RbmParams& params);

/// Exact gradient of the mean log-likelihood over the batch: the CD positive
/// phase with the negative phase replaced by exact model expectations.
GradientEstimate exact_log_likelihood_gradient(const RbmParams& params, const Matrix& batch);

/// Mean log-likelihood of the batch via enumeration (uses exact_log_partition).
double exact_mean_log_likelihood(const RbmParams& params, const Matrix& batch);

enum class AisSchedule { linear, geometric_tail };

struct AisConfig {
  int num_temperatures = 10000;  // 1,000 is plenty for test-sized models
  int num_chains = 100;
  AisSchedule schedule = AisSchedule::linear;
  Vector base_bias;  // visible biases of the independent base model; empty = zeros
};

struct AisEstimate {
  double log_z_mean = 0.0;
  double log_z_ci_low = 0.0;   // +-3 sigma of the importance-weight spread
  double log_z_ci_high = 0.0;  // propagated into the log domain
  double effective_sample_size = 0.0;
  double log_weight_std = 0.0;  // std of per-chain log weights
};

/// Annealed importance sampling estimate of log Z for a binary-visible RBM.
/// Intermediate distributions scale the coupling terms by beta and blend the
/// visible bias between the base model and the target. Chain m uses the
/// stream derived from (seed, m), so adding chains never perturbs existing ones.
AisEstimate ais_log_partition(const RbmParams& params, const AisConfig& config,
                              std::uint64_t seed);

/// Strictly increasing inverse temperatures from 0 to 1, num_temperatures + 1 points.
std::vector<double> ais_schedule(AisSchedule schedule, int num_temperatures);

/// Visible biases of an independent model matched to per-dimension data means,
/// clamped logits.
Vector fit_base_bias(const Matrix& data);

/// mean_x [ -free_energy(x) ] - log_z, a lower bound when log_z is an AIS
/// overestimate of the true partition function.
double avg_test_log_prob(const RbmParams& params, const Matrix& test_set, double log_z);

/// (sqrt(D) - |v|_1 / |v|_2) / (sqrt(D) - 1), in [0, 1]. Undefined (throws)
/// for the all-zero vector and for D < 2.
double hoyer_sparseness(const Vector& v);

struct SparsenessReport {
  std::vector<double> values;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

/// Hoyer sparseness of each example's hidden activation probability vector.
SparsenessReport representation_sparseness(const RbmParams& params, const Matrix& data);
/// Same, measured on the vector of group norms instead of individual units.
SparsenessReport representation_sparseness(const RbmParams& params, const Matrix& data,
                                           const Grouping& grouping);
SparsenessReport summarize_sparseness(std::vector<double> values);

/// Mixture responsibilities of component RBMs sharing a visible layer:
/// softmax over k of (sum_j softplus(x.w^k_j + c^k_j)) / temperature.
/// Evaluated in the log domain; visible biases do not enter.
Vector third_order_responsibility(const std::vector<RbmParams>& components,
                                  const Vector& visible, double temperature);

struct LinearProbeConfig {
  int iterations = 300;
  double learning_rate = 0.5;
  double momentum = 0.9;
  double l2 = 1e-4;
};

/// Multinomial logistic regression trained by full-batch gradient descent on
/// the train split; returns accuracy on the test split.
double linear_probe(const Matrix& train_features, const std::vector<int>& train_labels,
                    const Matrix& test_features, const std::vector<int>& test_labels,
                    int num_classes, const LinearProbeConfig& config = {});

}  // namespace sgrbm
