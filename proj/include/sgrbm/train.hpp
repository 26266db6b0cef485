#pragma once

#include <functional>

#include "sgrbm/checkpoint.hpp"
#include "sgrbm/data.hpp"

namespace sgrbm {

struct TelemetryRecord {
  int epoch = 0;
  int batch = 0;
  double reconstruction_error = 0.0;   // mean squared error of the deterministic reconstruction
  double penalty = 0.0;                // mean mixed-norm penalty over the batch
  double mean_hidden_activation = 0.0;
  double wall_time_s = 0.0;            // since training started
};

struct TrainHooks {
  std::function<void(const TelemetryRecord&)> telemetry;
  /// Called with the initial state (epoch 0), at each save interval, and is
  /// not called for the final state: the trainer returns that.
  std::function<void(const RbmCheckpoint&)> save_rbm;
  std::function<void(const DbmCheckpoint&)> save_dbm;
};

/// Momentum-SGD CD-k training loop with the configured regularizer. Hidden
/// units are grouped uniformly by config.group_size when the sparse-group
/// kind is active. Deterministic for a fixed seed and config.
RbmCheckpoint train_rbm(const Dataset& data, Eigen::Index num_hidden, VisibleType type,
                        const TrainConfig& train, const RegularizerConfig& reg,
                        const TrainHooks& hooks = {});

/// Greedy pretraining of both layers followed by persistent-chain
/// stochastic-approximation training with mean-field positive phase.
DbmCheckpoint train_dbm(const Dataset& data, Eigen::Index h1, Eigen::Index h2,
                        const DbmConfig& config, const TrainHooks& hooks = {});

}  // namespace sgrbm
