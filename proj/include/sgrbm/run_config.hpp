#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sgrbm/dbm.hpp"

namespace sgrbm {

/// Sectioned key=value text. Grammar: '#' starts a comment, blank lines are
/// skipped, "[name]" opens a section, "key = value" assigns within the current
/// section. Keys before any section header belong to the top-level section "".
class KeyValueFile {
 public:
  static KeyValueFile parse_file(const std::string& path);
  static KeyValueFile parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  double require_double(const std::string& section, const std::string& key) const;
  long long get_int(const std::string& section, const std::string& key, long long fallback) const;
  long long require_int(const std::string& section, const std::string& key) const;
  std::uint64_t require_u64(const std::string& section, const std::string& key) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

  std::vector<std::string> keys(const std::string& section) const;
  const std::string& origin() const { return origin_; }

  /// Throws ConfigError if a section holds keys outside the allowed set.
  void reject_unknown_keys(const std::string& section,
                           const std::vector<std::string>& allowed) const;

 private:
  std::string origin_;
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

enum class ModelType { rbm, dbm };
enum class DataKind { idx, patches };

struct RunConfig {
  // [model]
  ModelType model_type = ModelType::rbm;
  VisibleType visible_type = VisibleType::binary;
  int num_visible = 0;  // 0 = take from data
  int num_hidden = 0;
  int num_hidden2 = 0;  // dbm only

  // [regularizer]
  RegularizerConfig regularizer;
  RegularizerConfig regularizer2;  // dbm layer 2; defaults mirror layer 1

  // [optimizer]
  TrainConfig train;
  int pretrain_epochs = 0;
  int num_particles = 100;
  double mf_tolerance = 1e-6;
  int mf_max_iters = 50;

  // [data]
  DataKind data_kind = DataKind::idx;
  std::string images_path;
  std::string labels_path;
  std::string test_images_path;
  std::string test_labels_path;
  long long limit = 0;       // 0 = all
  long long test_limit = 0;
  std::uint64_t subset_seed = 0;
  std::string patch_dir;
  int patch_size = 14;
  int patch_count = 100000;
  Whitening whitening = Whitening::zca;

  // [eval]
  bool eval_exact = false;
  bool eval_ais = false;
  int ais_temperatures = 1000;
  int ais_chains = 100;
  AisSchedule ais_schedule = AisSchedule::linear;
  bool eval_sparseness = true;
  bool eval_avg_log_prob = false;
  bool eval_linear_probe = false;
  LinearProbeConfig probe;

  // top level
  std::uint64_t seed = 0;
  std::string output_dir;

  DbmConfig dbm_config() const;
};

/// Parses and validates a run config. Field-level problems throw ConfigError
/// messages of the form "<origin>: [section].key: ...". Referenced data paths
/// must exist; the seed is mandatory.
RunConfig parse_run_config(const std::string& path);
RunConfig run_config_from_text(const std::string& text, const std::string& origin = "<string>");

/// Loads the training (and optional test) datasets named by the config.
Dataset load_train_dataset(const RunConfig& config);
std::optional<Dataset> load_test_dataset(const RunConfig& config);

}  // namespace sgrbm
