#include "sgrbm/types.hpp"

#include "sgrbm/errors.hpp"

namespace sgrbm {

const char* to_string(VisibleType type) {
  return type == VisibleType::binary ? "binary" : "gaussian";
}

VisibleType visible_type_from_string(const std::string& name) {
  if (name == "binary") return VisibleType::binary;
  if (name == "gaussian" || name == "gaussian-unit-variance") return VisibleType::gaussian;
  throw ParameterError("unknown visible type '" + name + "'");
}

bool RbmParams::shape_consistent() const {
  return visible_bias.size() == weights.rows() && hidden_bias.size() == weights.cols();
}

bool RbmParams::all_finite() const {
  return weights.allFinite() && visible_bias.allFinite() && hidden_bias.allFinite();
}

RbmParams zero_rbm(Eigen::Index num_visible, Eigen::Index num_hidden, VisibleType type) {
  RbmParams params;
  params.weights = Matrix::Zero(num_visible, num_hidden);
  params.visible_bias = Vector::Zero(num_visible);
  params.hidden_bias = Vector::Zero(num_hidden);
  params.visible_type = type;
  return params;
}

bool GradientEstimate::all_finite() const {
  return d_weights.allFinite() && d_visible_bias.allFinite() && d_hidden_bias.allFinite();
}

GradientEstimate& GradientEstimate::operator-=(const GradientEstimate& other) {
  d_weights -= other.d_weights;
  d_visible_bias -= other.d_visible_bias;
  d_hidden_bias -= other.d_hidden_bias;
  return *this;
}

GradientEstimate zero_gradient(Eigen::Index num_visible, Eigen::Index num_hidden) {
  GradientEstimate grad;
  grad.d_weights = Matrix::Zero(num_visible, num_hidden);
  grad.d_visible_bias = Vector::Zero(num_visible);
  grad.d_hidden_bias = Vector::Zero(num_hidden);
  return grad;
}

void require_shape_match(const RbmParams& params, const GradientEstimate& grad) {
  if (grad.d_weights.rows() != params.weights.rows() ||
      grad.d_weights.cols() != params.weights.cols() ||
      grad.d_visible_bias.size() != params.visible_bias.size() ||
      grad.d_hidden_bias.size() != params.hidden_bias.size()) {
    throw DimensionError("gradient shape does not match parameters");
  }
}

}  // namespace sgrbm
