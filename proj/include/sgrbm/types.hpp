#pragma once

#include <string>

#include "sgrbm/math.hpp"

namespace sgrbm {

enum class VisibleType { binary, gaussian };

const char* to_string(VisibleType type);
VisibleType visible_type_from_string(const std::string& name);

/// RBM parameters. weights(i, j) couples visible unit i with hidden unit j.
/// Gaussian visible units are unit-variance; data for them is expected to be
/// standardized.
struct RbmParams {
  Matrix weights;       // V x H
  Vector visible_bias;  // V
  Vector hidden_bias;   // H
  VisibleType visible_type = VisibleType::binary;

  Eigen::Index num_visible() const { return weights.rows(); }
  Eigen::Index num_hidden() const { return weights.cols(); }
  bool shape_consistent() const;
  bool all_finite() const;
};

RbmParams zero_rbm(Eigen::Index num_visible, Eigen::Index num_hidden,
                   VisibleType type = VisibleType::binary);

/// One Gibbs chain state: a visible configuration, the last sampled hidden
/// configuration, and the probabilities the hidden sample was drawn from.
struct GibbsState {
  Vector visible;
  Vector hidden;
  Vector hidden_probs;
};

struct GradientEstimate {
  Matrix d_weights;       // V x H
  Vector d_visible_bias;  // V
  Vector d_hidden_bias;   // H
  Eigen::Index batch_size = 0;

  bool all_finite() const;
  GradientEstimate& operator-=(const GradientEstimate& other);
};

GradientEstimate zero_gradient(Eigen::Index num_visible, Eigen::Index num_hidden);

void require_shape_match(const RbmParams& params, const GradientEstimate& grad);

}  // namespace sgrbm
