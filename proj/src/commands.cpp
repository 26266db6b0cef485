#include "sgrbm/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "sgrbm/errors.hpp"
#include "sgrbm/metrics.hpp"
#include "sgrbm/run_config.hpp"
#include "sgrbm/train.hpp"
#include "sgrbm/viz.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace sgrbm::cli {

namespace {

constexpr std::uint64_t kEvalAisStream = 30;
constexpr std::uint64_t kSampleStream = 40;

std::string checkpoint_name(ModelType type, int epoch) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "ckpt-epoch-%04d.%s", epoch,
                type == ModelType::rbm ? "sgrbm" : "sgdbm");
  return buf;
}

std::pair<int, int> parse_shape(const std::string& shape, Eigen::Index visible) {
  if (!shape.empty()) {
    const auto x = shape.find('x');
    if (x == std::string::npos) {
      throw ParameterError("shape must look like ROWSxCOLS, got '" + shape + "'");
    }
    int rows = 0, cols = 0;
    try {
      rows = std::stoi(shape.substr(0, x));
      cols = std::stoi(shape.substr(x + 1));
    } catch (const std::exception&) {
      throw ParameterError("shape must look like ROWSxCOLS, got '" + shape + "'");
    }
    if (rows < 1 || cols < 1 || static_cast<Eigen::Index>(rows) * cols != visible) {
      throw ParameterError("shape " + shape + " does not cover " + std::to_string(visible) +
                           " visible units");
    }
    return {rows, cols};
  }
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(visible))));
  if (static_cast<Eigen::Index>(side) * side != visible) {
    throw ParameterError("visible dimension " + std::to_string(visible) +
                         " is not square; pass --shape ROWSxCOLS");
  }
  return {side, side};
}

class KeyValueReport {
 public:
  void add(const std::string& key, const std::string& value) {
    lines_.push_back(key + "=" + value);
  }
  void add(const std::string& key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", value);
    add(key, std::string(buf));
  }
  void add(const std::string& key, long long value) { add(key, std::to_string(value)); }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open file for writing");
    for (const auto& line : lines_) out << line << "\n";
  }
  const std::vector<std::string>& lines() const { return lines_; }

 private:
  std::vector<std::string> lines_;
};

}  // namespace

void run_train(const TrainOptions& options) {
  RunConfig config = parse_run_config(options.config_path);
  if (options.seed_override) {
    config.seed = *options.seed_override;
    config.train.seed = *options.seed_override;
  }
  if (options.data_override) {
    if (!fs::exists(*options.data_override)) {
      throw ConfigError("--data: path '" + *options.data_override + "' does not exist");
    }
    if (config.data_kind == DataKind::idx) {
      config.images_path = *options.data_override;
    } else {
      config.patch_dir = *options.data_override;
    }
  }
  const std::string out_dir = options.out_override.value_or(config.output_dir);
  if (out_dir.empty()) {
    throw ConfigError(options.config_path + ": output_dir missing (set it or pass --out)");
  }
  fs::create_directories(out_dir);

  const Dataset data = load_train_dataset(config);

  std::ofstream telemetry_file(fs::path(out_dir) / "telemetry.jsonl", std::ios::trunc);
  if (!telemetry_file) throw ConfigError(out_dir + ": cannot write telemetry file");

  TrainHooks hooks;
  hooks.telemetry = [&](const TelemetryRecord& r) {
    const json line = {{"epoch", r.epoch},
                       {"batch", r.batch},
                       {"recon_error", r.reconstruction_error},
                       {"penalty", r.penalty},
                       {"mean_hidden", r.mean_hidden_activation},
                       {"wall_time_s", r.wall_time_s}};
    telemetry_file << line.dump() << "\n";
    telemetry_file.flush();
  };
  hooks.save_rbm = [&](const RbmCheckpoint& ckpt) {
    save_checkpoint((fs::path(out_dir) / checkpoint_name(ModelType::rbm, static_cast<int>(ckpt.epoch))).string(),
                    ckpt);
  };
  hooks.save_dbm = [&](const DbmCheckpoint& ckpt) {
    save_checkpoint((fs::path(out_dir) / checkpoint_name(ModelType::dbm, static_cast<int>(ckpt.epoch))).string(),
                    ckpt);
  };

  if (config.model_type == ModelType::rbm) {
    const RbmCheckpoint final_ckpt = train_rbm(data, config.num_hidden, config.visible_type,
                                               config.train, config.regularizer, hooks);
    const std::string final_path = (fs::path(out_dir) / "final.sgrbm").string();
    save_checkpoint(final_path, final_ckpt);
    std::cout << "trained rbm (" << data.dim() << " visible, " << config.num_hidden
              << " hidden) for " << config.train.epochs << " epochs -> " << final_path << "\n";
  } else {
    const DbmCheckpoint final_ckpt =
        train_dbm(data, config.num_hidden, config.num_hidden2, config.dbm_config(), hooks);
    const std::string final_path = (fs::path(out_dir) / "final.sgdbm").string();
    save_checkpoint(final_path, final_ckpt);
    std::cout << "trained dbm (" << data.dim() << "-" << config.num_hidden << "-"
              << config.num_hidden2 << ") for " << config.train.epochs << " epochs -> "
              << final_path << "\n";
  }
}

namespace {

void eval_rbm(const RunConfig& config, const RbmCheckpoint& ckpt, const Dataset& eval_data,
              const std::optional<Dataset>& train_data, KeyValueReport& report,
              std::string& summary) {
  const RbmParams& params = ckpt.params;
  report.add("model_kind", "rbm");
  report.add("visible_type", to_string(params.visible_type));
  report.add("num_visible", static_cast<long long>(params.num_visible()));
  report.add("num_hidden", static_cast<long long>(params.num_hidden()));
  report.add("eval_items", static_cast<long long>(eval_data.size()));

  double log_z = 0.0;
  bool have_log_z = false;

  if (config.eval_exact) {
    log_z = exact_log_partition(params);
    have_log_z = true;
    report.add("exact_log_z", log_z);
    summary += "exact log Z: " + std::to_string(log_z) + "\n";
  }
  if (config.eval_ais) {
    AisConfig ais;
    ais.num_temperatures = config.ais_temperatures;
    ais.num_chains = config.ais_chains;
    ais.schedule = config.ais_schedule;
    ais.base_bias = fit_base_bias(eval_data.items);
    const AisEstimate est = ais_log_partition(params, ais, derive_seed(config.seed, {kEvalAisStream}));
    if (!have_log_z) {
      log_z = est.log_z_mean;
      have_log_z = true;
    }
    report.add("ais_log_z", est.log_z_mean);
    report.add("ais_ci_low", est.log_z_ci_low);
    report.add("ais_ci_high", est.log_z_ci_high);
    report.add("ais_ess", est.effective_sample_size);
    report.add("ais_log_weight_std", est.log_weight_std);
    summary += "AIS log Z: " + std::to_string(est.log_z_mean) + " [" +
               std::to_string(est.log_z_ci_low) + ", " + std::to_string(est.log_z_ci_high) +
               "], ESS " + std::to_string(est.effective_sample_size) + "\n";
  }
  if (config.eval_avg_log_prob) {
    if (!have_log_z) {
      throw ConfigError("[eval].avg_log_prob needs exact=true or ais=true for log Z");
    }
    const double avg = avg_test_log_prob(params, eval_data.items, log_z);
    report.add("avg_test_log_prob", avg);
    summary += "avg test log-probability: " + std::to_string(avg) + "\n";
  }
  if (config.eval_sparseness) {
    const SparsenessReport sp = representation_sparseness(params, eval_data.items);
    report.add("sparseness_mean", sp.mean);
    report.add("sparseness_min", sp.min);
    report.add("sparseness_max", sp.max);
    summary += "hidden sparseness: mean " + std::to_string(sp.mean) + " in [" +
               std::to_string(sp.min) + ", " + std::to_string(sp.max) + "]\n";
    if (ckpt.has_grouping && ckpt.grouping.num_groups() >= 2) {
      const SparsenessReport gsp =
          representation_sparseness(params, eval_data.items, ckpt.grouping);
      report.add("group_sparseness_mean", gsp.mean);
      report.add("group_sparseness_min", gsp.min);
      report.add("group_sparseness_max", gsp.max);
    }
  }
  if (config.eval_linear_probe) {
    if (!train_data || !train_data->has_labels() || !eval_data.has_labels()) {
      throw ConfigError("[eval].linear_probe needs labeled train and test data");
    }
    const Matrix train_features = hidden_probabilities(params, train_data->items);
    const Matrix test_features = hidden_probabilities(params, eval_data.items);
    const double feature_acc = linear_probe(train_features, train_data->labels, test_features,
                                            eval_data.labels, 10, config.probe);
    const double pixel_acc = linear_probe(train_data->items, train_data->labels, eval_data.items,
                                          eval_data.labels, 10, config.probe);
    report.add("probe_accuracy_features", feature_acc);
    report.add("probe_accuracy_pixels", pixel_acc);
    report.add("probe_train_items", static_cast<long long>(train_data->size()));
    summary += "linear probe: features " + std::to_string(feature_acc) + ", raw pixels " +
               std::to_string(pixel_acc) + "\n";
  }
}

void eval_dbm(const RunConfig& config, const DbmCheckpoint& ckpt, const Dataset& eval_data,
              KeyValueReport& report, std::string& summary) {
  if (config.eval_exact || config.eval_ais || config.eval_avg_log_prob ||
      config.eval_linear_probe) {
    throw UnsupportedError("dbm evaluation supports sparseness reports only");
  }
  const DbmParams& params = ckpt.params;
  report.add("model_kind", "dbm");
  report.add("num_visible", static_cast<long long>(params.num_visible()));
  report.add("num_hidden", static_cast<long long>(params.num_hidden1()));
  report.add("num_hidden2", static_cast<long long>(params.num_hidden2()));
  report.add("eval_items", static_cast<long long>(eval_data.size()));

  const MeanFieldBatch mf = mean_field_posterior(params, eval_data.items);
  std::vector<double> layer1, layer2;
  layer1.reserve(static_cast<std::size_t>(mf.mu1.rows()));
  layer2.reserve(static_cast<std::size_t>(mf.mu2.rows()));
  for (Eigen::Index l = 0; l < mf.mu1.rows(); ++l) {
    layer1.push_back(hoyer_sparseness(mf.mu1.row(l).transpose()));
    layer2.push_back(hoyer_sparseness(mf.mu2.row(l).transpose()));
  }
  const SparsenessReport sp1 = summarize_sparseness(std::move(layer1));
  const SparsenessReport sp2 = summarize_sparseness(std::move(layer2));
  report.add("sparseness1_mean", sp1.mean);
  report.add("sparseness1_min", sp1.min);
  report.add("sparseness1_max", sp1.max);
  report.add("sparseness2_mean", sp2.mean);
  report.add("sparseness2_min", sp2.min);
  report.add("sparseness2_max", sp2.max);
  report.add("mean_field_converged", mf.converged ? "true" : "false");
  summary += "layer-1 sparseness: mean " + std::to_string(sp1.mean) + "\n";
  summary += "layer-2 sparseness: mean " + std::to_string(sp2.mean) + "\n";
}

}  // namespace

void run_eval(const EvalOptions& options) {
  RunConfig config = parse_run_config(options.config_path);
  if (options.seed_override) config.seed = *options.seed_override;
  if (!fs::exists(options.checkpoint_path)) {
    throw ConfigError("--checkpoint: path '" + options.checkpoint_path + "' does not exist");
  }
  const std::string out_dir = options.out_override.value_or(config.output_dir);
  if (out_dir.empty()) {
    throw ConfigError(options.config_path + ": output_dir missing (set it or pass --out)");
  }
  fs::create_directories(out_dir);

  // The eval set is --data when given, else the config's test split, else the
  // training images.
  Dataset eval_data;
  std::optional<Dataset> train_data;
  if (options.data_override) {
    if (!fs::exists(*options.data_override)) {
      throw ConfigError("--data: path '" + *options.data_override + "' does not exist");
    }
    eval_data = load_idx(*options.data_override);
  } else if (auto test = load_test_dataset(config)) {
    eval_data = std::move(*test);
  } else {
    eval_data = load_train_dataset(config);
  }
  if (config.eval_linear_probe) train_data = load_train_dataset(config);

  KeyValueReport report;
  std::string summary;
  const CheckpointKind kind = peek_checkpoint_kind(options.checkpoint_path);
  if (kind == CheckpointKind::rbm) {
    eval_rbm(config, load_rbm_checkpoint(options.checkpoint_path), eval_data, train_data, report,
             summary);
  } else {
    eval_dbm(config, load_dbm_checkpoint(options.checkpoint_path), eval_data, report, summary);
  }

  report.write((fs::path(out_dir) / "report.kv").string());
  std::ofstream txt(fs::path(out_dir) / "report.txt");
  txt << "evaluation of " << options.checkpoint_path << "\n\n" << summary;
  std::cout << summary;
}

void run_visualize(const VisualizeOptions& options) {
  const CheckpointKind kind = peek_checkpoint_kind(options.checkpoint_path);

  Matrix weights;
  Grouping grouping;
  bool has_grouping = false;
  if (kind == CheckpointKind::rbm) {
    RbmCheckpoint ckpt = load_rbm_checkpoint(options.checkpoint_path);
    weights = std::move(ckpt.params.weights);
    grouping = std::move(ckpt.grouping);
    has_grouping = ckpt.has_grouping;
  } else {
    DbmCheckpoint ckpt = load_dbm_checkpoint(options.checkpoint_path);
    weights = std::move(ckpt.params.w1);
    grouping = std::move(ckpt.grouping1);
    has_grouping = ckpt.has_groupings;
  }

  const auto [rows, cols] = parse_shape(options.shape, weights.rows());
  TileGridOptions grid;
  grid.tile_rows = rows;
  grid.tile_cols = cols;
  grid.grid_cols = options.grid_cols;
  if (has_grouping) grid.grouping = &grouping;

  write_pgm(options.out_path, render_filter_grid(weights, grid));
  std::cout << "wrote " << weights.cols() << " filter tiles -> " << options.out_path << "\n";
}

void run_sample(const SampleOptions& options) {
  if (options.chains < 1) throw ParameterError("--chains must be >= 1");
  if (options.steps < 0) throw ParameterError("--steps must be >= 0");
  if (options.thinning < 0) throw ParameterError("--thin must be >= 0");

  if (peek_checkpoint_kind(options.checkpoint_path) != CheckpointKind::rbm) {
    throw UnsupportedError("sample supports rbm checkpoints only");
  }
  const RbmCheckpoint ckpt = load_rbm_checkpoint(options.checkpoint_path);
  const RbmParams& params = ckpt.params;
  if (params.visible_type != VisibleType::binary) {
    throw UnsupportedError("sample requires a binary-visible model");
  }

  RngStream rng = RngStream::derive(options.seed, {kSampleStream});
  Matrix state =
      sample_bernoulli(Matrix::Constant(options.chains, params.num_visible(), 0.5), rng);

  std::vector<Matrix> snapshots;
  if (options.steps == 0) {
    snapshots.push_back(state);
  } else {
    for (int step = 1; step <= options.steps; ++step) {
      const Matrix hidden_sample = sample_bernoulli(hidden_probabilities(params, state), rng);
      const Matrix visible_probs = visible_probabilities(params, hidden_sample);
      state = sample_bernoulli(visible_probs, rng);
      const bool thinned = options.thinning > 0 && step % options.thinning == 0;
      if (thinned || step == options.steps) snapshots.push_back(visible_probs);
    }
  }

  // One grid row per chain, snapshots left to right.
  const auto per_chain = static_cast<Eigen::Index>(snapshots.size());
  Matrix tiles(params.num_visible(), options.chains * per_chain);
  for (Eigen::Index m = 0; m < options.chains; ++m) {
    for (Eigen::Index s = 0; s < per_chain; ++s) {
      tiles.col(m * per_chain + s) = snapshots[static_cast<std::size_t>(s)].row(m).transpose();
    }
  }

  const auto [rows, cols] = parse_shape(options.shape, params.num_visible());
  TileGridOptions grid;
  grid.tile_rows = rows;
  grid.tile_cols = cols;
  grid.grid_cols = static_cast<int>(per_chain);
  write_pgm(options.out_path, render_value_grid(tiles, grid));
  std::cout << "wrote " << options.chains << " chains x " << per_chain << " snapshots -> "
            << options.out_path << "\n";
}

}  // namespace sgrbm::cli
