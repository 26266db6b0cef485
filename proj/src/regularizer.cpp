#include "sgrbm/regularizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sgrbm/errors.hpp"

namespace sgrbm {

Grouping Grouping::uniform(Eigen::Index num_hidden, int group_size) {
  if (num_hidden < 1) throw ParameterError("Grouping::uniform: need at least one hidden unit");
  if (group_size < 1) throw ParameterError("Grouping::uniform: group_size must be >= 1");
  Grouping g;
  g.group_of.resize(static_cast<std::size_t>(num_hidden));
  for (Eigen::Index start = 0; start < num_hidden; start += group_size) {
    const Eigen::Index end = std::min(start + group_size, num_hidden);
    std::vector<int> members;
    members.reserve(static_cast<std::size_t>(end - start));
    for (Eigen::Index j = start; j < end; ++j) {
      g.group_of[static_cast<std::size_t>(j)] = static_cast<int>(g.groups.size());
      members.push_back(static_cast<int>(j));
    }
    g.groups.push_back(std::move(members));
  }
  return g;
}

bool Grouping::is_partition() const {
  std::vector<char> seen(group_of.size(), 0);
  for (std::size_t k = 0; k < groups.size(); ++k) {
    if (groups[k].empty()) return false;
    for (int j : groups[k]) {
      if (j < 0 || static_cast<std::size_t>(j) >= group_of.size()) return false;
      if (seen[static_cast<std::size_t>(j)]) return false;
      if (group_of[static_cast<std::size_t>(j)] != static_cast<int>(k)) return false;
      seen[static_cast<std::size_t>(j)] = 1;
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

const char* to_string(RegularizerKind kind) {
  switch (kind) {
    case RegularizerKind::none: return "none";
    case RegularizerKind::sparse_group: return "sparse_group";
    case RegularizerKind::sparse_rbm_baseline: return "sparse_rbm_baseline";
  }
  return "?";
}

RegularizerKind regularizer_kind_from_string(const std::string& name) {
  if (name == "none") return RegularizerKind::none;
  if (name == "sparse_group") return RegularizerKind::sparse_group;
  if (name == "sparse_rbm_baseline") return RegularizerKind::sparse_rbm_baseline;
  throw ParameterError("unknown regularizer kind '" + name + "'");
}

namespace {

void require_grouping_fits(const Grouping& grouping, Eigen::Index num_hidden) {
  if (grouping.num_units() != num_hidden) {
    throw DimensionError("grouping covers " + std::to_string(grouping.num_units()) +
                         " units, model has " + std::to_string(num_hidden));
  }
  for (const auto& members : grouping.groups) {
    if (members.empty()) throw ConfigError("grouping contains an empty group");
  }
}

// Per-unit coefficient lambda * P^2 (1 - P) / max(N_k, eps) for one prob row.
Vector penalty_coefficients(const Vector& probs, const Grouping& grouping,
                            const RegularizerConfig& config) {
  const Vector norms = group_norms(probs, grouping);
  Vector coef(probs.size());
  for (Eigen::Index j = 0; j < probs.size(); ++j) {
    const double p = probs[j];
    const double norm = std::max(norms[grouping.group_of[static_cast<std::size_t>(j)]],
                                 config.epsilon_norm);
    coef[j] = config.lambda * p * p * (1.0 - p) / norm;
  }
  return coef;
}

}  // namespace

Vector group_norms(const Vector& probs, const Grouping& grouping) {
  require_grouping_fits(grouping, probs.size());
  Vector norms(grouping.num_groups());
  for (Eigen::Index k = 0; k < grouping.num_groups(); ++k) {
    double sq = 0.0;
    for (int j : grouping.groups[static_cast<std::size_t>(k)]) {
      sq += probs[j] * probs[j];
    }
    norms[k] = std::sqrt(sq);
  }
  return norms;
}

double mixed_norm_penalty(const Vector& probs, const Grouping& grouping) {
  return group_norms(probs, grouping).sum();
}

GradientEstimate penalty_gradient(const RbmParams& params, const Vector& visible,
                                  const Grouping& grouping, const RegularizerConfig& config) {
  if (config.kind != RegularizerKind::sparse_group) {
    throw ParameterError("penalty_gradient requires kind = sparse_group");
  }
  require_grouping_fits(grouping, params.num_hidden());

  const Vector probs = hidden_probabilities(params, visible);
  const Vector coef = penalty_coefficients(probs, grouping, config);

  GradientEstimate grad = zero_gradient(params.num_visible(), params.num_hidden());
  grad.d_weights = visible * coef.transpose();
  grad.d_hidden_bias = coef;
  grad.batch_size = 1;
  return grad;
}

GradientEstimate regularized_cd_gradient(const RbmParams& params, const Matrix& batch,
                                         int cd_steps, const Grouping& grouping,
                                         const RegularizerConfig& config, RngStream& rng) {
  GradientEstimate grad = cd_gradient(params, batch, cd_steps, rng);
  if (config.kind != RegularizerKind::sparse_group || config.lambda == 0.0) {
    return grad;
  }
  require_grouping_fits(grouping, params.num_hidden());

  const auto batch_size = batch.rows();
  const double scale = 1.0 / static_cast<double>(batch_size);
  const Matrix probs = hidden_probabilities(params, batch);
  Matrix coef(batch_size, params.num_hidden());
  for (Eigen::Index l = 0; l < batch_size; ++l) {
    coef.row(l) = penalty_coefficients(probs.row(l).transpose(), grouping, config).transpose();
  }
  grad.d_weights -= scale * (batch.transpose() * coef);
  grad.d_hidden_bias -= scale * coef.colwise().sum().transpose();
  return grad;
}

GradientEstimate sparse_rbm_baseline_gradient(const RbmParams& params, const Matrix& batch,
                                              double target_p, double weight) {
  if (!(target_p > 0.0 && target_p < 1.0)) {
    throw ParameterError("sparse_rbm_baseline_gradient: target p must lie in (0, 1)");
  }
  const auto batch_size = batch.rows();
  if (batch_size == 0) throw ParameterError("sparse_rbm_baseline_gradient: empty batch");
  const double scale = 1.0 / static_cast<double>(batch_size);

  const Matrix probs = hidden_probabilities(params, batch);
  const Vector mean_act = probs.colwise().mean().transpose();

  // penalty = weight * sum_j (p - mean_j)^2; chain rule through each example's
  // sigmoid: d mean_j / d w_ij = mean_l P (1-P) x_i / L.
  const Vector outer = -2.0 * weight * (Vector::Constant(mean_act.size(), target_p) - mean_act);
  const Matrix slope = probs.array() * (1.0 - probs.array());  // L x H

  GradientEstimate grad = zero_gradient(params.num_visible(), params.num_hidden());
  grad.d_weights = scale * (batch.transpose() * slope) * outer.asDiagonal();
  grad.d_hidden_bias = (scale * slope.colwise().sum().transpose().array() * outer.array()).matrix();
  grad.batch_size = batch_size;
  return grad;
}

}  // namespace sgrbm
