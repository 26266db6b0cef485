#pragma once

#include "sgrbm/regularizer.hpp"

namespace sgrbm {

/// Two-layer deep Boltzmann machine with binary units and energy
///   E(x, h1, h2) = -x.W1 h1 - h1.W2 h2 - x.b - h1.c1 - h2.c2
struct DbmParams {
  Matrix w1;  // V x H1
  Matrix w2;  // H1 x H2
  Vector visible_bias;   // V
  Vector hidden1_bias;   // H1
  Vector hidden2_bias;   // H2

  Eigen::Index num_visible() const { return w1.rows(); }
  Eigen::Index num_hidden1() const { return w1.cols(); }
  Eigen::Index num_hidden2() const { return w2.cols(); }
  bool shape_consistent() const;
  bool all_finite() const;
};

DbmParams zero_dbm(Eigen::Index v, Eigen::Index h1, Eigen::Index h2);
DbmParams init_dbm(Eigen::Index v, Eigen::Index h1, Eigen::Index h2, double weight_sigma,
                   RngStream& rng);

double energy(const DbmParams& params, const Vector& visible, const Vector& hidden1,
              const Vector& hidden2);

struct MeanFieldState {
  Vector mu1;
  Vector mu2;
  int iterations_used = 0;
  bool converged = false;
};

/// Damped fixed-point iteration for the factorized posterior over (h1, h2):
///   mu1 <- sigmoid(W1.x + W2 mu2 + c1),  mu2 <- sigmoid(W2.mu1 + c2)
/// initialized from the layerwise feedforward pass. Convergence is measured
/// by the self-consistency residual of the returned state, so converged
/// implies the state satisfies its own update equations to within tol.
MeanFieldState mean_field_posterior(const DbmParams& params, const Vector& visible,
                                    double tol = 1e-6, int max_iters = 50,
                                    double damping = 0.5);

/// Batch version: each row of the outputs is the fixed point for that data row.
struct MeanFieldBatch {
  Matrix mu1;  // L x H1
  Matrix mu2;  // L x H2
  int iterations_used = 0;
  bool converged = false;
};
MeanFieldBatch mean_field_posterior(const DbmParams& params, const Matrix& batch,
                                    double tol = 1e-6, int max_iters = 50,
                                    double damping = 0.5);

/// Persistent Markov chains for the stochastic-approximation negative phase.
struct FantasyParticles {
  Matrix visible;  // M x V, binary entries
  Matrix hidden1;  // M x H1
  Matrix hidden2;  // M x H2

  Eigen::Index count() const { return visible.rows(); }
};

/// Chains start at uniform random visibles followed by one upward pass.
FantasyParticles init_particles(const DbmParams& params, int count, RngStream& rng);

/// One alternating sweep per particle: h1 | x, h2; then x | h1 and h2 | h1.
void advance_particles(const DbmParams& params, FantasyParticles& particles, RngStream& rng);

struct DbmGradient {
  Matrix d_w1;
  Matrix d_w2;
  Vector d_visible_bias;
  Vector d_hidden1_bias;
  Vector d_hidden2_bias;

  bool all_finite() const;
};

struct DbmOptimizerState {
  Matrix vel_w1;
  Matrix vel_w2;
  Vector vel_visible_bias;
  Vector vel_hidden1_bias;
  Vector vel_hidden2_bias;

  static DbmOptimizerState zeros(const DbmParams& params);
};

struct DbmConfig {
  TrainConfig optimizer;
  RegularizerConfig reg1;  // lambda, group size for layer 1
  RegularizerConfig reg2;  // lambda' and group size for layer 2
  int pretrain_epochs = 0;
  int num_particles = 100;
  double mf_tolerance = 1e-6;
  int mf_max_iters = 50;
  double mf_damping = 0.5;
};

/// Sparse-group penalty corrections at a mean-field fixed point, treated with
/// stop-gradient: the mu1 penalty reaches W1/c1 through sigmoid(W1.x + ...),
/// the mu2 penalty reaches W2/c2 through sigmoid(W2.mu1 + c2); mu values on
/// the other side of each sigmoid are held fixed. To be subtracted.
DbmGradient dbm_penalty_correction(const Vector& visible, const Vector& mu1, const Vector& mu2,
                                   const Grouping& g1, const Grouping& g2,
                                   const RegularizerConfig& reg1, const RegularizerConfig& reg2);

struct DbmStepStats {
  double reconstruction_error = 0.0;
  double penalty = 0.0;
  double mean_hidden = 0.0;
};

/// One stochastic-approximation update: mean-field positive phase, one Gibbs
/// sweep of the fantasy particles for the negative phase, sparse-group
/// corrections on both hidden layers, momentum SGD ascent.
DbmStepStats dbm_train_step(DbmParams& params, const Matrix& batch, FantasyParticles& particles,
                            const Grouping& g1, const Grouping& g2, const DbmConfig& config,
                            DbmOptimizerState& opt, RngStream& rng);

/// Trains a sparse group RBM on the data, a second one on the first layer's
/// hidden probabilities, and assembles the two into DbmParams. The second
/// RBM's visible bias duplicates the layer-1 hidden bias and is dropped.
DbmParams greedy_pretrain(const Matrix& data, Eigen::Index h1, Eigen::Index h2,
                          const DbmConfig& config);

}  // namespace sgrbm
