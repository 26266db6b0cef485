#include "sgrbm/rbm.hpp"

#include <cmath>
#include <sstream>

#include "sgrbm/errors.hpp"

namespace sgrbm {

namespace {

void require_visible_length(const RbmParams& params, Eigen::Index length) {
  if (length != params.num_visible()) {
    std::ostringstream msg;
    msg << "visible vector length " << length << " does not match model V=" << params.num_visible();
    throw DimensionError(msg.str());
  }
}

void require_hidden_length(const RbmParams& params, Eigen::Index length) {
  if (length != params.num_hidden()) {
    std::ostringstream msg;
    msg << "hidden vector length " << length << " does not match model H=" << params.num_hidden();
    throw DimensionError(msg.str());
  }
}

}  // namespace

double energy(const RbmParams& params, const Vector& visible, const Vector& hidden) {
  require_visible_length(params, visible.size());
  require_hidden_length(params, hidden.size());
  const double coupling = visible.dot(params.weights * hidden);
  const double hidden_term = hidden.dot(params.hidden_bias);
  if (params.visible_type == VisibleType::binary) {
    return -coupling - visible.dot(params.visible_bias) - hidden_term;
  }
  const double quadratic = 0.5 * (visible - params.visible_bias).squaredNorm();
  return quadratic - coupling - hidden_term;
}

Vector hidden_probabilities(const RbmParams& params, const Vector& visible) {
  require_visible_length(params, visible.size());
  return sigmoid(Vector(params.weights.transpose() * visible + params.hidden_bias));
}

Matrix hidden_probabilities(const RbmParams& params, const Matrix& batch) {
  require_visible_length(params, batch.cols());
  Matrix act = batch * params.weights;
  act.rowwise() += params.hidden_bias.transpose();
  return sigmoid(act);
}

Vector visible_probabilities(const RbmParams& params, const Vector& hidden) {
  require_hidden_length(params, hidden.size());
  Vector act = params.weights * hidden + params.visible_bias;
  if (params.visible_type == VisibleType::binary) return sigmoid(Vector(act));
  return act;
}

Matrix visible_probabilities(const RbmParams& params, const Matrix& hidden_batch) {
  require_hidden_length(params, hidden_batch.cols());
  Matrix act = hidden_batch * params.weights.transpose();
  act.rowwise() += params.visible_bias.transpose();
  if (params.visible_type == VisibleType::binary) return sigmoid(act);
  return act;
}

double free_energy(const RbmParams& params, const Vector& visible) {
  require_visible_length(params, visible.size());
  const Vector act = params.weights.transpose() * visible + params.hidden_bias;
  const double experts = softplus(act).sum();
  if (params.visible_type == VisibleType::binary) {
    return -visible.dot(params.visible_bias) - experts;
  }
  return 0.5 * (visible - params.visible_bias).squaredNorm() - experts;
}

Vector free_energies(const RbmParams& params, const Matrix& batch) {
  require_visible_length(params, batch.cols());
  Matrix act = batch * params.weights;
  act.rowwise() += params.hidden_bias.transpose();
  const Vector experts =
      act.unaryExpr([](double t) { return softplus(t); }).rowwise().sum();
  if (params.visible_type == VisibleType::binary) {
    return (-(batch * params.visible_bias) - experts).eval();
  }
  Matrix centered = batch;
  centered.rowwise() -= params.visible_bias.transpose();
  return (0.5 * centered.rowwise().squaredNorm() - experts).eval();
}

GibbsState gibbs_step(const RbmParams& params, const GibbsState& state, RngStream& rng) {
  GibbsState next;
  next.hidden_probs = hidden_probabilities(params, state.visible);
  next.hidden = sample_bernoulli(next.hidden_probs, rng);
  const Vector cond = visible_probabilities(params, next.hidden);
  if (params.visible_type == VisibleType::binary) {
    next.visible = sample_bernoulli(cond, rng);
  } else {
    next.visible = add_unit_gaussian(cond, rng);
  }
  return next;
}

GradientEstimate cd_gradient(const RbmParams& params, const Matrix& batch, int cd_steps,
                             RngStream& rng) {
  if (cd_steps < 1) throw ParameterError("cd_gradient: cd_steps must be >= 1");
  require_visible_length(params, batch.cols());
  const auto batch_size = batch.rows();
  if (batch_size == 0) throw ParameterError("cd_gradient: empty batch");
  const double scale = 1.0 / static_cast<double>(batch_size);

  const Matrix pos_hidden = hidden_probabilities(params, batch);

  Matrix recon = batch;
  Matrix hidden_probs = pos_hidden;
  for (int step = 0; step < cd_steps; ++step) {
    const Matrix hidden_sample = sample_bernoulli(hidden_probs, rng);
    const Matrix cond = visible_probabilities(params, hidden_sample);
    if (params.visible_type == VisibleType::binary) {
      recon = sample_bernoulli(cond, rng);
    } else {
      recon = add_unit_gaussian(cond, rng);
    }
    hidden_probs = hidden_probabilities(params, recon);
  }

  GradientEstimate grad;
  grad.d_weights = scale * (batch.transpose() * pos_hidden - recon.transpose() * hidden_probs);
  grad.d_visible_bias = scale * (batch.colwise().sum() - recon.colwise().sum()).transpose();
  grad.d_hidden_bias =
      scale * (pos_hidden.colwise().sum() - hidden_probs.colwise().sum()).transpose();
  grad.batch_size = batch_size;
  return grad;
}

OptimizerState OptimizerState::zeros(Eigen::Index num_visible, Eigen::Index num_hidden) {
  OptimizerState opt;
  opt.vel_weights = Matrix::Zero(num_visible, num_hidden);
  opt.vel_visible_bias = Vector::Zero(num_visible);
  opt.vel_hidden_bias = Vector::Zero(num_hidden);
  return opt;
}

bool OptimizerState::all_finite() const {
  return vel_weights.allFinite() && vel_visible_bias.allFinite() && vel_hidden_bias.allFinite();
}

void apply_update(RbmParams& params, const GradientEstimate& grad, OptimizerState& opt,
                  const TrainConfig& config) {
  require_shape_match(params, grad);

  opt.vel_weights = config.momentum * opt.vel_weights + grad.d_weights;
  opt.vel_visible_bias = config.momentum * opt.vel_visible_bias + grad.d_visible_bias;
  opt.vel_hidden_bias = config.momentum * opt.vel_hidden_bias + grad.d_hidden_bias;

  params.weights +=
      config.learning_rate * (opt.vel_weights - config.weight_decay * params.weights);
  params.visible_bias += config.learning_rate * opt.vel_visible_bias;
  params.hidden_bias += config.learning_rate * opt.vel_hidden_bias;

  if (!params.all_finite()) {
    std::ostringstream msg;
    msg << "non-finite parameters after update:";
    if (!params.weights.allFinite()) msg << " weights";
    if (!params.visible_bias.allFinite()) msg << " visible_bias";
    if (!params.hidden_bias.allFinite()) msg << " hidden_bias";
    throw NumericError(msg.str());
  }
}

RbmParams init_rbm(Eigen::Index num_visible, Eigen::Index num_hidden, VisibleType type,
                   double weight_sigma, RngStream& rng) {
  RbmParams params = zero_rbm(num_visible, num_hidden, type);
  for (Eigen::Index i = 0; i < num_visible; ++i) {
    for (Eigen::Index j = 0; j < num_hidden; ++j) {
      params.weights(i, j) = weight_sigma * rng.gaussian();
    }
  }
  return params;
}

void init_visible_bias_from_means(RbmParams& params, const Vector& per_dim_means) {
  require_visible_length(params, per_dim_means.size());
  if (params.visible_type == VisibleType::gaussian) {
    params.visible_bias = per_dim_means;
    return;
  }
  for (Eigen::Index i = 0; i < per_dim_means.size(); ++i) {
    const double p = std::min(std::max(per_dim_means[i], 1e-6), 1.0 - 1e-6);
    params.visible_bias[i] = std::clamp(std::log(p / (1.0 - p)), -4.0, 4.0);
  }
}

}  // namespace sgrbm
