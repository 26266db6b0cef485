#include "sgrbm/train.hpp"

#include <chrono>
#include <iostream>

#include "sgrbm/errors.hpp"

namespace sgrbm {

namespace {

// rng stream path tags under the master seed
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kSampleStream = 2;
constexpr std::uint64_t kParticleStream = 4;
constexpr std::uint64_t kDbmSampleStream = 5;
constexpr std::uint64_t kDbmShuffleStream = 6;
constexpr std::uint64_t kPretrainLayer1 = 10;
constexpr std::uint64_t kPretrainLayer2 = 11;

void validate_common(const Dataset& data, const TrainConfig& train) {
  if (data.size() < 1) throw ParameterError("train: empty dataset");
  if (train.batch_size < 1) throw ParameterError("train: batch_size must be >= 1");
  if (train.epochs < 0) throw ParameterError("train: epochs must be >= 0");
  if (train.cd_steps < 1) throw ParameterError("train: cd_steps must be >= 1");
  if (!(train.learning_rate > 0.0)) throw ParameterError("train: learning_rate must be positive");
}

void validate_regularizer(const RegularizerConfig& reg, Eigen::Index num_hidden) {
  if (reg.lambda < 0.0) throw ParameterError("regularizer: lambda must be non-negative");
  if (reg.kind == RegularizerKind::sparse_group) {
    if (reg.group_size < 1) throw ParameterError("regularizer: group_size must be >= 1");
    if (reg.group_size > 10) {
      std::cerr << "warning: group_size " << reg.group_size
                << " above the recommended bound of 10\n";
    }
    if (!(reg.epsilon_norm > 0.0)) throw ParameterError("regularizer: epsilon must be positive");
  }
  if (reg.kind == RegularizerKind::sparse_rbm_baseline) {
    const double p = reg.effective_baseline_target(num_hidden);
    if (!(p > 0.0 && p < 1.0)) {
      throw ParameterError("regularizer: baseline target must land in (0, 1); got " +
                           std::to_string(p));
    }
  }
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

RbmCheckpoint train_rbm(const Dataset& data, Eigen::Index num_hidden, VisibleType type,
                        const TrainConfig& train, const RegularizerConfig& reg,
                        const TrainHooks& hooks) {
  validate_common(data, train);
  if (num_hidden < 1) throw ParameterError("train: need at least one hidden unit");
  validate_regularizer(reg, num_hidden);

  const Eigen::Index v = data.dim();
  RngStream init_stream = RngStream::derive(train.seed, {kInitStream});
  RbmParams params = init_rbm(v, num_hidden, type, train.weight_init_sigma, init_stream);
  init_visible_bias_from_means(params, data.items.colwise().mean().transpose());

  Grouping grouping;
  const bool sparse_group = reg.kind == RegularizerKind::sparse_group;
  if (sparse_group) grouping = Grouping::uniform(num_hidden, reg.group_size);

  OptimizerState opt = OptimizerState::zeros(v, num_hidden);
  RngStream sample_stream = RngStream::derive(train.seed, {kSampleStream});

  auto make_checkpoint = [&](int epoch) {
    RbmCheckpoint ckpt;
    ckpt.params = params;
    ckpt.epoch = static_cast<std::uint32_t>(epoch);
    ckpt.opt = opt;
    ckpt.has_opt = true;
    if (sparse_group) {
      ckpt.grouping = grouping;
      ckpt.has_grouping = true;
    }
    ckpt.rng_state = sample_stream.save_state();
    ckpt.has_rng = true;
    return ckpt;
  };

  if (hooks.save_rbm) hooks.save_rbm(make_checkpoint(0));
  const auto start = std::chrono::steady_clock::now();

  TrainConfig epoch_config = train;
  for (int epoch = 1; epoch <= train.epochs; ++epoch) {
    epoch_config.momentum = train.momentum_for_epoch(epoch);
    const auto batches = minibatch_indices(
        data.size(), train.batch_size,
        derive_seed(train.seed, {kShuffleStream, static_cast<std::uint64_t>(epoch)}));

    int batch_index = 0;
    for (const auto& indices : batches) {
      ++batch_index;
      const Matrix batch = gather_rows(data.items, indices);

      GradientEstimate grad;
      switch (reg.kind) {
        case RegularizerKind::none:
          grad = cd_gradient(params, batch, train.cd_steps, sample_stream);
          break;
        case RegularizerKind::sparse_group:
          grad = regularized_cd_gradient(params, batch, train.cd_steps, grouping, reg,
                                         sample_stream);
          break;
        case RegularizerKind::sparse_rbm_baseline:
          grad = cd_gradient(params, batch, train.cd_steps, sample_stream);
          grad -= sparse_rbm_baseline_gradient(params, batch,
                                               reg.effective_baseline_target(num_hidden),
                                               reg.baseline_weight);
          break;
      }
      if (!grad.all_finite()) throw NumericError("non-finite gradient estimate");
      apply_update(params, grad, opt, epoch_config);

      if (hooks.telemetry) {
        const Matrix probs = hidden_probabilities(params, batch);
        Matrix recon = visible_probabilities(params, probs);
        TelemetryRecord record;
        record.epoch = epoch;
        record.batch = batch_index;
        record.reconstruction_error =
            (batch - recon).squaredNorm() / static_cast<double>(batch.size());
        record.mean_hidden_activation = probs.mean();
        if (sparse_group) {
          double total = 0.0;
          for (Eigen::Index l = 0; l < probs.rows(); ++l) {
            total += mixed_norm_penalty(probs.row(l).transpose(), grouping);
          }
          record.penalty = total / static_cast<double>(probs.rows());
        }
        record.wall_time_s = elapsed_seconds(start);
        hooks.telemetry(record);
      }
    }

    if (hooks.save_rbm && train.save_interval > 0 && epoch % train.save_interval == 0 &&
        epoch != train.epochs) {
      hooks.save_rbm(make_checkpoint(epoch));
    }
  }

  return make_checkpoint(train.epochs);
}

DbmParams greedy_pretrain(const Matrix& data, Eigen::Index h1, Eigen::Index h2,
                          const DbmConfig& config) {
  if (h1 < 1 || h2 < 1) throw ParameterError("greedy_pretrain: layer sizes must be positive");

  TrainConfig sub = config.optimizer;
  sub.epochs = config.pretrain_epochs;
  sub.save_interval = 0;

  Dataset layer1_data;
  layer1_data.items = data;
  sub.seed = derive_seed(config.optimizer.seed, {kPretrainLayer1});
  const RbmParams rbm1 =
      train_rbm(layer1_data, h1, VisibleType::binary, sub, config.reg1).params;

  Dataset layer2_data;
  layer2_data.items = hidden_probabilities(rbm1, data);
  sub.seed = derive_seed(config.optimizer.seed, {kPretrainLayer2});
  const RbmParams rbm2 =
      train_rbm(layer2_data, h2, VisibleType::binary, sub, config.reg2).params;

  // The second RBM's visible bias models the same units as the first RBM's
  // hidden bias; the first one wins.
  DbmParams params;
  params.w1 = rbm1.weights;
  params.w2 = rbm2.weights;
  params.visible_bias = rbm1.visible_bias;
  params.hidden1_bias = rbm1.hidden_bias;
  params.hidden2_bias = rbm2.hidden_bias;
  return params;
}

DbmCheckpoint train_dbm(const Dataset& data, Eigen::Index h1, Eigen::Index h2,
                        const DbmConfig& config, const TrainHooks& hooks) {
  validate_common(data, config.optimizer);
  if (config.num_particles < 1) throw ParameterError("train: need at least one fantasy particle");
  validate_regularizer(config.reg1, h1);
  validate_regularizer(config.reg2, h2);

  DbmParams params = greedy_pretrain(data.items, h1, h2, config);

  const Grouping g1 = Grouping::uniform(h1, config.reg1.group_size);
  const Grouping g2 = Grouping::uniform(h2, config.reg2.group_size);

  RngStream particle_stream = RngStream::derive(config.optimizer.seed, {kParticleStream});
  FantasyParticles particles = init_particles(params, config.num_particles, particle_stream);
  DbmOptimizerState opt = DbmOptimizerState::zeros(params);
  RngStream sample_stream = RngStream::derive(config.optimizer.seed, {kDbmSampleStream});

  auto make_checkpoint = [&](int epoch) {
    DbmCheckpoint ckpt;
    ckpt.params = params;
    ckpt.epoch = static_cast<std::uint32_t>(epoch);
    ckpt.opt = opt;
    ckpt.has_opt = true;
    ckpt.grouping1 = g1;
    ckpt.grouping2 = g2;
    ckpt.has_groupings = true;
    ckpt.particles = particles;
    ckpt.has_particles = true;
    ckpt.rng_state = sample_stream.save_state();
    ckpt.has_rng = true;
    return ckpt;
  };

  if (hooks.save_dbm) hooks.save_dbm(make_checkpoint(0));
  const auto start = std::chrono::steady_clock::now();

  DbmConfig epoch_config = config;
  for (int epoch = 1; epoch <= config.optimizer.epochs; ++epoch) {
    epoch_config.optimizer.momentum = config.optimizer.momentum_for_epoch(epoch);
    const auto batches = minibatch_indices(
        data.size(), config.optimizer.batch_size,
        derive_seed(config.optimizer.seed, {kDbmShuffleStream, static_cast<std::uint64_t>(epoch)}));

    int batch_index = 0;
    for (const auto& indices : batches) {
      ++batch_index;
      const Matrix batch = gather_rows(data.items, indices);
      const DbmStepStats stats =
          dbm_train_step(params, batch, particles, g1, g2, epoch_config, opt, sample_stream);

      if (hooks.telemetry) {
        TelemetryRecord record;
        record.epoch = epoch;
        record.batch = batch_index;
        record.reconstruction_error = stats.reconstruction_error;
        record.penalty = stats.penalty;
        record.mean_hidden_activation = stats.mean_hidden;
        record.wall_time_s = elapsed_seconds(start);
        hooks.telemetry(record);
      }
    }

    if (hooks.save_dbm && config.optimizer.save_interval > 0 &&
        epoch % config.optimizer.save_interval == 0 && epoch != config.optimizer.epochs) {
      hooks.save_dbm(make_checkpoint(epoch));
    }
  }

  return make_checkpoint(config.optimizer.epochs);
}

}  // namespace sgrbm
