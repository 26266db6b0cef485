#include "sgrbm/dbm.hpp"

#include <cmath>

#include "sgrbm/errors.hpp"

namespace sgrbm {

bool DbmParams::shape_consistent() const {
  return visible_bias.size() == w1.rows() && hidden1_bias.size() == w1.cols() &&
         w2.rows() == w1.cols() && hidden2_bias.size() == w2.cols();
}

bool DbmParams::all_finite() const {
  return w1.allFinite() && w2.allFinite() && visible_bias.allFinite() &&
         hidden1_bias.allFinite() && hidden2_bias.allFinite();
}

DbmParams zero_dbm(Eigen::Index v, Eigen::Index h1, Eigen::Index h2) {
  DbmParams params;
  params.w1 = Matrix::Zero(v, h1);
  params.w2 = Matrix::Zero(h1, h2);
  params.visible_bias = Vector::Zero(v);
  params.hidden1_bias = Vector::Zero(h1);
  params.hidden2_bias = Vector::Zero(h2);
  return params;
}

DbmParams init_dbm(Eigen::Index v, Eigen::Index h1, Eigen::Index h2, double weight_sigma,
                   RngStream& rng) {
  DbmParams params = zero_dbm(v, h1, h2);
  for (Eigen::Index i = 0; i < v; ++i)
    for (Eigen::Index j = 0; j < h1; ++j) params.w1(i, j) = weight_sigma * rng.gaussian();
  for (Eigen::Index i = 0; i < h1; ++i)
    for (Eigen::Index j = 0; j < h2; ++j) params.w2(i, j) = weight_sigma * rng.gaussian();
  return params;
}

double energy(const DbmParams& params, const Vector& visible, const Vector& hidden1,
              const Vector& hidden2) {
  if (visible.size() != params.num_visible() || hidden1.size() != params.num_hidden1() ||
      hidden2.size() != params.num_hidden2()) {
    throw DimensionError("dbm energy: state shapes do not match parameters");
  }
  return -visible.dot(params.w1 * hidden1) - hidden1.dot(params.w2 * hidden2) -
         visible.dot(params.visible_bias) - hidden1.dot(params.hidden1_bias) -
         hidden2.dot(params.hidden2_bias);
}

MeanFieldState mean_field_posterior(const DbmParams& params, const Vector& visible, double tol,
                                    int max_iters, double damping) {
  if (tol <= 0.0) throw ParameterError("mean_field_posterior: tol must be positive");
  if (visible.size() != params.num_visible()) {
    throw DimensionError("mean_field_posterior: visible length mismatch");
  }

  // Bottom-up input never changes across iterations.
  const Vector bottom_up = params.w1.transpose() * visible + params.hidden1_bias;

  MeanFieldState state;
  state.mu1 = sigmoid(bottom_up);
  state.mu2 = sigmoid(Vector(params.w2.transpose() * state.mu1 + params.hidden2_bias));

  for (int iter = 1; iter <= max_iters; ++iter) {
    const Vector t1 = sigmoid(Vector(bottom_up + params.w2 * state.mu2));
    state.mu1 = (1.0 - damping) * state.mu1 + damping * t1;
    const Vector t2 = sigmoid(Vector(params.w2.transpose() * state.mu1 + params.hidden2_bias));
    state.mu2 = (1.0 - damping) * state.mu2 + damping * t2;

    const double r1 =
        (state.mu1 - sigmoid(Vector(bottom_up + params.w2 * state.mu2))).cwiseAbs().maxCoeff();
    const double r2 =
        (state.mu2 - sigmoid(Vector(params.w2.transpose() * state.mu1 + params.hidden2_bias)))
            .cwiseAbs()
            .maxCoeff();
    state.iterations_used = iter;
    if (std::max(r1, r2) <= tol) {
      state.converged = true;
      break;
    }
  }
  return state;
}

MeanFieldBatch mean_field_posterior(const DbmParams& params, const Matrix& batch, double tol,
                                    int max_iters, double damping) {
  if (tol <= 0.0) throw ParameterError("mean_field_posterior: tol must be positive");
  if (batch.cols() != params.num_visible()) {
    throw DimensionError("mean_field_posterior: batch width mismatch");
  }

  Matrix bottom_up = batch * params.w1;
  bottom_up.rowwise() += params.hidden1_bias.transpose();

  MeanFieldBatch state;
  state.mu1 = sigmoid(bottom_up);
  Matrix act2 = state.mu1 * params.w2;
  act2.rowwise() += params.hidden2_bias.transpose();
  state.mu2 = sigmoid(act2);

  auto residual = [&]() {
    Matrix a1 = bottom_up + state.mu2 * params.w2.transpose();
    Matrix a2 = state.mu1 * params.w2;
    a2.rowwise() += params.hidden2_bias.transpose();
    const double r1 = (state.mu1 - sigmoid(a1)).cwiseAbs().maxCoeff();
    const double r2 = (state.mu2 - sigmoid(a2)).cwiseAbs().maxCoeff();
    return std::max(r1, r2);
  };

  for (int iter = 1; iter <= max_iters; ++iter) {
    const Matrix t1 = sigmoid(Matrix(bottom_up + state.mu2 * params.w2.transpose()));
    state.mu1 = (1.0 - damping) * state.mu1 + damping * t1;
    Matrix a2 = state.mu1 * params.w2;
    a2.rowwise() += params.hidden2_bias.transpose();
    const Matrix t2 = sigmoid(a2);
    state.mu2 = (1.0 - damping) * state.mu2 + damping * t2;

    state.iterations_used = iter;
    if (residual() <= tol) {
      state.converged = true;
      break;
    }
  }
  return state;
}

FantasyParticles init_particles(const DbmParams& params, int count, RngStream& rng) {
  if (count < 1) throw ParameterError("init_particles: need at least one particle");
  FantasyParticles particles;
  particles.visible = sample_bernoulli(Matrix::Constant(count, params.num_visible(), 0.5), rng);

  Matrix act1 = particles.visible * params.w1;
  act1.rowwise() += params.hidden1_bias.transpose();
  particles.hidden1 = sample_bernoulli(sigmoid(act1), rng);

  Matrix act2 = particles.hidden1 * params.w2;
  act2.rowwise() += params.hidden2_bias.transpose();
  particles.hidden2 = sample_bernoulli(sigmoid(act2), rng);
  return particles;
}

void advance_particles(const DbmParams& params, FantasyParticles& particles, RngStream& rng) {
  // h1 | x, h2
  Matrix act1 = particles.visible * params.w1 + particles.hidden2 * params.w2.transpose();
  act1.rowwise() += params.hidden1_bias.transpose();
  particles.hidden1 = sample_bernoulli(sigmoid(act1), rng);

  // x | h1
  Matrix actv = particles.hidden1 * params.w1.transpose();
  actv.rowwise() += params.visible_bias.transpose();
  particles.visible = sample_bernoulli(sigmoid(actv), rng);

  // h2 | h1
  Matrix act2 = particles.hidden1 * params.w2;
  act2.rowwise() += params.hidden2_bias.transpose();
  particles.hidden2 = sample_bernoulli(sigmoid(act2), rng);
}

bool DbmGradient::all_finite() const {
  return d_w1.allFinite() && d_w2.allFinite() && d_visible_bias.allFinite() &&
         d_hidden1_bias.allFinite() && d_hidden2_bias.allFinite();
}

DbmOptimizerState DbmOptimizerState::zeros(const DbmParams& params) {
  DbmOptimizerState opt;
  opt.vel_w1 = Matrix::Zero(params.w1.rows(), params.w1.cols());
  opt.vel_w2 = Matrix::Zero(params.w2.rows(), params.w2.cols());
  opt.vel_visible_bias = Vector::Zero(params.num_visible());
  opt.vel_hidden1_bias = Vector::Zero(params.num_hidden1());
  opt.vel_hidden2_bias = Vector::Zero(params.num_hidden2());
  return opt;
}

namespace {

// lambda * mu^2 (1 - mu) / max(N_k, eps) per unit, for one mean-field row.
Vector correction_coefficients(const Vector& mu, const Grouping& grouping,
                               const RegularizerConfig& config) {
  const Vector norms = group_norms(mu, grouping);
  Vector coef(mu.size());
  for (Eigen::Index j = 0; j < mu.size(); ++j) {
    const double p = mu[j];
    const double norm =
        std::max(norms[grouping.group_of[static_cast<std::size_t>(j)]], config.epsilon_norm);
    coef[j] = config.lambda * p * p * (1.0 - p) / norm;
  }
  return coef;
}

}  // namespace

DbmGradient dbm_penalty_correction(const Vector& visible, const Vector& mu1, const Vector& mu2,
                                   const Grouping& g1, const Grouping& g2,
                                   const RegularizerConfig& reg1,
                                   const RegularizerConfig& reg2) {
  DbmGradient grad;
  grad.d_w1 = Matrix::Zero(visible.size(), mu1.size());
  grad.d_w2 = Matrix::Zero(mu1.size(), mu2.size());
  grad.d_visible_bias = Vector::Zero(visible.size());
  grad.d_hidden1_bias = Vector::Zero(mu1.size());
  grad.d_hidden2_bias = Vector::Zero(mu2.size());

  if (reg1.lambda != 0.0) {
    const Vector coef1 = correction_coefficients(mu1, g1, reg1);
    grad.d_w1 = visible * coef1.transpose();
    grad.d_hidden1_bias = coef1;
  }
  if (reg2.lambda != 0.0) {
    const Vector coef2 = correction_coefficients(mu2, g2, reg2);
    grad.d_w2 = mu1 * coef2.transpose();
    grad.d_hidden2_bias = coef2;
  }
  return grad;
}

DbmStepStats dbm_train_step(DbmParams& params, const Matrix& batch, FantasyParticles& particles,
                            const Grouping& g1, const Grouping& g2, const DbmConfig& config,
                            DbmOptimizerState& opt, RngStream& rng) {
  if (batch.cols() != params.num_visible()) {
    throw DimensionError("dbm_train_step: batch width mismatch");
  }
  const auto batch_size = batch.rows();
  if (batch_size == 0) throw ParameterError("dbm_train_step: empty batch");
  const double scale = 1.0 / static_cast<double>(batch_size);
  const double pscale = 1.0 / static_cast<double>(particles.count());

  const MeanFieldBatch mf = mean_field_posterior(params, batch, config.mf_tolerance,
                                                 config.mf_max_iters, config.mf_damping);

  advance_particles(params, particles, rng);

  DbmGradient grad;
  grad.d_w1 = scale * (batch.transpose() * mf.mu1) -
              pscale * (particles.visible.transpose() * particles.hidden1);
  grad.d_w2 = scale * (mf.mu1.transpose() * mf.mu2) -
              pscale * (particles.hidden1.transpose() * particles.hidden2);
  grad.d_visible_bias =
      (scale * batch.colwise().sum() - pscale * particles.visible.colwise().sum()).transpose();
  grad.d_hidden1_bias =
      (scale * mf.mu1.colwise().sum() - pscale * particles.hidden1.colwise().sum()).transpose();
  grad.d_hidden2_bias =
      (scale * mf.mu2.colwise().sum() - pscale * particles.hidden2.colwise().sum()).transpose();

  const bool reg1_on = config.reg1.kind == RegularizerKind::sparse_group && config.reg1.lambda != 0.0;
  const bool reg2_on = config.reg2.kind == RegularizerKind::sparse_group && config.reg2.lambda != 0.0;
  if (reg1_on || reg2_on) {
    RegularizerConfig r1 = config.reg1;
    RegularizerConfig r2 = config.reg2;
    if (!reg1_on) r1.lambda = 0.0;
    if (!reg2_on) r2.lambda = 0.0;
    for (Eigen::Index l = 0; l < batch_size; ++l) {
      const DbmGradient corr = dbm_penalty_correction(
          batch.row(l).transpose(), mf.mu1.row(l).transpose(), mf.mu2.row(l).transpose(), g1, g2,
          r1, r2);
      grad.d_w1 -= scale * corr.d_w1;
      grad.d_w2 -= scale * corr.d_w2;
      grad.d_hidden1_bias -= scale * corr.d_hidden1_bias;
      grad.d_hidden2_bias -= scale * corr.d_hidden2_bias;
    }
  }

  const TrainConfig& sgd = config.optimizer;
  opt.vel_w1 = sgd.momentum * opt.vel_w1 + grad.d_w1;
  opt.vel_w2 = sgd.momentum * opt.vel_w2 + grad.d_w2;
  opt.vel_visible_bias = sgd.momentum * opt.vel_visible_bias + grad.d_visible_bias;
  opt.vel_hidden1_bias = sgd.momentum * opt.vel_hidden1_bias + grad.d_hidden1_bias;
  opt.vel_hidden2_bias = sgd.momentum * opt.vel_hidden2_bias + grad.d_hidden2_bias;

  params.w1 += sgd.learning_rate * (opt.vel_w1 - sgd.weight_decay * params.w1);
  params.w2 += sgd.learning_rate * (opt.vel_w2 - sgd.weight_decay * params.w2);
  params.visible_bias += sgd.learning_rate * opt.vel_visible_bias;
  params.hidden1_bias += sgd.learning_rate * opt.vel_hidden1_bias;
  params.hidden2_bias += sgd.learning_rate * opt.vel_hidden2_bias;

  if (!params.all_finite()) {
    throw NumericError("non-finite dbm parameters after update");
  }

  DbmStepStats stats;
  Matrix recon = mf.mu1 * params.w1.transpose();
  recon.rowwise() += params.visible_bias.transpose();
  recon = sigmoid(recon);
  stats.reconstruction_error = (batch - recon).squaredNorm() * scale / batch.cols();
  stats.mean_hidden = mf.mu1.mean();
  if (reg1_on || reg2_on) {
    double total = 0.0;
    for (Eigen::Index l = 0; l < batch_size; ++l) {
      if (reg1_on) total += mixed_norm_penalty(mf.mu1.row(l).transpose(), g1);
      if (reg2_on) total += mixed_norm_penalty(mf.mu2.row(l).transpose(), g2);
    }
    stats.penalty = total * scale;
  }
  return stats;
}

}  // namespace sgrbm
