#include "sgrbm/run_config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sgrbm/errors.hpp"
#include "sgrbm/metrics.hpp"

namespace fs = std::filesystem;

namespace sgrbm {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string spot(const std::string& section, const std::string& key) {
  return section.empty() ? key : "[" + section + "]." + key;
}

}  // namespace

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str(), path);
}

KeyValueFile KeyValueFile::parse_string(const std::string& text, const std::string& origin) {
  KeyValueFile kv;
  kv.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    if (stripped.front() == '[') {
      if (stripped.back() != ']') {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": unterminated section header");
      }
      section = trim(stripped.substr(1, stripped.size() - 2));
      if (section.empty()) {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty section name");
      }
      kv.sections_[section];
      continue;
    }
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value, got '" +
                        stripped + "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    }
    if (kv.sections_[section].count(key)) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" +
                        spot(section, key) + "'");
    }
    kv.sections_[section][key] = value;
  }
  return kv;
}

bool KeyValueFile::has(const std::string& section, const std::string& key) const {
  const auto it = sections_.find(section);
  return it != sections_.end() && it->second.count(key) > 0;
}

std::string KeyValueFile::get_string(const std::string& section, const std::string& key) const {
  const auto it = sections_.find(section);
  if (it == sections_.end() || !it->second.count(key)) {
    throw ConfigError(origin_ + ": missing required key " + spot(section, key));
  }
  return it->second.at(key);
}

std::string KeyValueFile::get_string(const std::string& section, const std::string& key,
                                     const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

double KeyValueFile::require_double(const std::string& section, const std::string& key) const {
  const std::string raw = get_string(section, key);
  try {
    std::size_t pos = 0;
    const double value = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument("trailing");
    return value;
  } catch (const std::exception&) {
    throw ConfigError(origin_ + ": " + spot(section, key) + ": '" + raw + "' is not a number");
  }
}

double KeyValueFile::get_double(const std::string& section, const std::string& key,
                                double fallback) const {
  return has(section, key) ? require_double(section, key) : fallback;
}

long long KeyValueFile::require_int(const std::string& section, const std::string& key) const {
  const std::string raw = get_string(section, key);
  try {
    std::size_t pos = 0;
    const long long value = std::stoll(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument("trailing");
    return value;
  } catch (const std::exception&) {
    throw ConfigError(origin_ + ": " + spot(section, key) + ": '" + raw + "' is not an integer");
  }
}

long long KeyValueFile::get_int(const std::string& section, const std::string& key,
                                long long fallback) const {
  return has(section, key) ? require_int(section, key) : fallback;
}

std::uint64_t KeyValueFile::require_u64(const std::string& section, const std::string& key) const {
  const std::string raw = get_string(section, key);
  try {
    std::size_t pos = 0;
    const unsigned long long value = std::stoull(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument("trailing");
    return value;
  } catch (const std::exception&) {
    throw ConfigError(origin_ + ": " + spot(section, key) + ": '" + raw +
                      "' is not an unsigned integer");
  }
}

bool KeyValueFile::get_bool(const std::string& section, const std::string& key,
                            bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string raw = get_string(section, key);
  if (raw == "true" || raw == "1" || raw == "yes") return true;
  if (raw == "false" || raw == "0" || raw == "no") return false;
  throw ConfigError(origin_ + ": " + spot(section, key) + ": '" + raw + "' is not a boolean");
}

std::vector<std::string> KeyValueFile::keys(const std::string& section) const {
  std::vector<std::string> out;
  const auto it = sections_.find(section);
  if (it == sections_.end()) return out;
  out.reserve(it->second.size());
  for (const auto& [key, value] : it->second) out.push_back(key);
  return out;
}

void KeyValueFile::reject_unknown_keys(const std::string& section,
                                       const std::vector<std::string>& allowed) const {
  for (const auto& key : keys(section)) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(origin_ + ": unknown key " + spot(section, key));
    }
  }
}

namespace {

void require_path_exists(const std::string& origin, const std::string& where,
                         const std::string& path) {
  if (!fs::exists(path)) {
    throw ConfigError(origin + ": " + where + ": path '" + path + "' does not exist");
  }
}

RegularizerConfig parse_regularizer_section(const KeyValueFile& kv, const std::string& section,
                                            const RegularizerConfig& defaults) {
  RegularizerConfig reg = defaults;
  if (kv.has(section, "kind")) {
    try {
      reg.kind = regularizer_kind_from_string(kv.get_string(section, "kind"));
    } catch (const ParameterError& e) {
      throw ConfigError(kv.origin() + ": [" + section + "].kind: " + e.what());
    }
  }
  reg.lambda = kv.get_double(section, "lambda", reg.lambda);
  reg.group_size = static_cast<int>(kv.get_int(section, "group_size", reg.group_size));
  reg.epsilon_norm = kv.get_double(section, "epsilon", reg.epsilon_norm);
  reg.baseline_target = kv.get_double(section, "baseline_target", reg.baseline_target);
  reg.baseline_weight = kv.get_double(section, "baseline_weight", reg.baseline_weight);
  reg.baseline_target_is_count =
      kv.get_bool(section, "baseline_target_is_count", reg.baseline_target_is_count);

  if (reg.lambda < 0.0) {
    throw ConfigError(kv.origin() + ": [" + section + "].lambda: must be non-negative");
  }
  if (reg.group_size < 1) {
    throw ConfigError(kv.origin() + ": [" + section + "].group_size: must be >= 1");
  }
  if (!(reg.epsilon_norm > 0.0)) {
    throw ConfigError(kv.origin() + ": [" + section + "].epsilon: must be positive");
  }
  return reg;
}

}  // namespace

DbmConfig RunConfig::dbm_config() const {
  DbmConfig config;
  config.optimizer = train;
  config.reg1 = regularizer;
  config.reg2 = regularizer2;
  config.pretrain_epochs = pretrain_epochs;
  config.num_particles = num_particles;
  config.mf_tolerance = mf_tolerance;
  config.mf_max_iters = mf_max_iters;
  return config;
}

RunConfig run_config_from_text(const std::string& text, const std::string& origin) {
  const KeyValueFile kv = KeyValueFile::parse_string(text, origin);

  kv.reject_unknown_keys("", {"seed", "output_dir"});
  kv.reject_unknown_keys("model", {"type", "visible", "hidden", "hidden2", "visible_type"});
  kv.reject_unknown_keys("regularizer",
                         {"kind", "lambda", "group_size", "epsilon", "baseline_target",
                          "baseline_weight", "baseline_target_is_count"});
  kv.reject_unknown_keys("regularizer2", {"kind", "lambda", "group_size", "epsilon"});
  kv.reject_unknown_keys(
      "optimizer", {"learning_rate", "momentum_initial", "momentum_final", "momentum_switch_epoch",
                    "weight_decay", "cd_steps", "epochs", "batch_size", "weight_init_sigma",
                    "save_interval", "particles", "pretrain_epochs", "mf_tolerance",
                    "mf_max_iters"});
  kv.reject_unknown_keys("data",
                         {"kind", "images", "labels", "test_images", "test_labels", "limit",
                          "test_limit", "subset_seed", "source_dir", "patch_size", "patch_count",
                          "whitening"});
  kv.reject_unknown_keys("eval",
                         {"exact", "ais", "ais_temperatures", "ais_chains", "ais_schedule",
                          "sparseness", "avg_log_prob", "linear_probe", "probe_iterations",
                          "probe_learning_rate"});

  RunConfig config;
  config.seed = kv.require_u64("", "seed");
  config.output_dir = kv.get_string("", "output_dir", "");

  // [model]
  const std::string model_type = kv.get_string("model", "type", "rbm");
  if (model_type == "rbm") {
    config.model_type = ModelType::rbm;
  } else if (model_type == "dbm") {
    config.model_type = ModelType::dbm;
  } else {
    throw ConfigError(kv.origin() + ": [model].type: unknown model type '" + model_type + "'");
  }
  try {
    config.visible_type =
        visible_type_from_string(kv.get_string("model", "visible_type", "binary"));
  } catch (const ParameterError& e) {
    throw ConfigError(kv.origin() + ": [model].visible_type: " + e.what());
  }
  config.num_visible = static_cast<int>(kv.get_int("model", "visible", 0));
  config.num_hidden = static_cast<int>(kv.require_int("model", "hidden"));
  if (config.num_hidden < 1) {
    throw ConfigError(kv.origin() + ": [model].hidden: must be >= 1");
  }
  if (config.model_type == ModelType::dbm) {
    config.num_hidden2 = static_cast<int>(kv.require_int("model", "hidden2"));
    if (config.num_hidden2 < 1) {
      throw ConfigError(kv.origin() + ": [model].hidden2: must be >= 1");
    }
    if (config.visible_type != VisibleType::binary) {
      throw ConfigError(kv.origin() + ": [model].visible_type: dbm supports binary only");
    }
  }

  // [regularizer] / [regularizer2]
  config.regularizer = parse_regularizer_section(kv, "regularizer", RegularizerConfig{});
  RegularizerConfig reg2_defaults = config.regularizer;
  reg2_defaults.baseline_target_is_count = false;
  config.regularizer2 = parse_regularizer_section(kv, "regularizer2", reg2_defaults);

  // [optimizer]
  TrainConfig& train = config.train;
  train.learning_rate = kv.get_double("optimizer", "learning_rate",
                                      config.visible_type == VisibleType::binary ? 0.05 : 0.001);
  train.momentum_initial = kv.get_double("optimizer", "momentum_initial", 0.5);
  train.momentum_final = kv.get_double("optimizer", "momentum_final", 0.9);
  train.momentum_switch_epoch =
      static_cast<int>(kv.get_int("optimizer", "momentum_switch_epoch", 5));
  train.momentum = train.momentum_initial;
  train.weight_decay = kv.get_double("optimizer", "weight_decay", 2e-4);
  train.cd_steps = static_cast<int>(kv.get_int("optimizer", "cd_steps", 1));
  train.epochs = static_cast<int>(kv.get_int("optimizer", "epochs", 10));
  train.batch_size = static_cast<int>(kv.get_int("optimizer", "batch_size", 100));
  train.weight_init_sigma = kv.get_double("optimizer", "weight_init_sigma", 0.01);
  train.save_interval = static_cast<int>(kv.get_int("optimizer", "save_interval", 0));
  train.seed = config.seed;
  config.pretrain_epochs = static_cast<int>(kv.get_int("optimizer", "pretrain_epochs", 0));
  config.num_particles = static_cast<int>(kv.get_int("optimizer", "particles", 100));
  config.mf_tolerance = kv.get_double("optimizer", "mf_tolerance", 1e-6);
  config.mf_max_iters = static_cast<int>(kv.get_int("optimizer", "mf_max_iters", 50));

  if (!(train.learning_rate > 0.0)) {
    throw ConfigError(kv.origin() + ": [optimizer].learning_rate: must be positive");
  }
  if (train.epochs < 0) throw ConfigError(kv.origin() + ": [optimizer].epochs: must be >= 0");
  if (train.batch_size < 1) {
    throw ConfigError(kv.origin() + ": [optimizer].batch_size: must be >= 1");
  }
  if (train.cd_steps < 1) throw ConfigError(kv.origin() + ": [optimizer].cd_steps: must be >= 1");
  if (train.save_interval < 0) {
    throw ConfigError(kv.origin() + ": [optimizer].save_interval: must be >= 0");
  }

  // [data]
  const std::string data_kind = kv.get_string("data", "kind", "idx");
  if (data_kind == "idx") {
    config.data_kind = DataKind::idx;
    config.images_path = kv.get_string("data", "images");
    require_path_exists(kv.origin(), "[data].images", config.images_path);
    config.labels_path = kv.get_string("data", "labels", "");
    if (!config.labels_path.empty()) {
      require_path_exists(kv.origin(), "[data].labels", config.labels_path);
    }
    config.test_images_path = kv.get_string("data", "test_images", "");
    if (!config.test_images_path.empty()) {
      require_path_exists(kv.origin(), "[data].test_images", config.test_images_path);
    }
    config.test_labels_path = kv.get_string("data", "test_labels", "");
    if (!config.test_labels_path.empty()) {
      require_path_exists(kv.origin(), "[data].test_labels", config.test_labels_path);
    }
  } else if (data_kind == "patches") {
    config.data_kind = DataKind::patches;
    config.patch_dir = kv.get_string("data", "source_dir");
    require_path_exists(kv.origin(), "[data].source_dir", config.patch_dir);
    config.patch_size = static_cast<int>(kv.get_int("data", "patch_size", 14));
    config.patch_count = static_cast<int>(kv.get_int("data", "patch_count", 100000));
    const std::string whitening = kv.get_string("data", "whitening", "zca");
    if (whitening == "zca") {
      config.whitening = Whitening::zca;
    } else if (whitening == "assume-prewhitened") {
      config.whitening = Whitening::assume_prewhitened;
    } else {
      throw ConfigError(kv.origin() + ": [data].whitening: unknown mode '" + whitening + "'");
    }
  } else {
    throw ConfigError(kv.origin() + ": [data].kind: unknown data kind '" + data_kind + "'");
  }
  config.limit = kv.get_int("data", "limit", 0);
  config.test_limit = kv.get_int("data", "test_limit", 0);
  config.subset_seed = kv.has("data", "subset_seed") ? kv.require_u64("data", "subset_seed") : 1;
  if (config.limit < 0) throw ConfigError(kv.origin() + ": [data].limit: must be >= 0");
  if (config.test_limit < 0) throw ConfigError(kv.origin() + ": [data].test_limit: must be >= 0");

  // [eval]
  config.eval_exact = kv.get_bool("eval", "exact", false);
  config.eval_ais = kv.get_bool("eval", "ais", false);
  config.ais_temperatures = static_cast<int>(kv.get_int("eval", "ais_temperatures", 1000));
  config.ais_chains = static_cast<int>(kv.get_int("eval", "ais_chains", 100));
  const std::string schedule = kv.get_string("eval", "ais_schedule", "linear");
  if (schedule == "linear") {
    config.ais_schedule = AisSchedule::linear;
  } else if (schedule == "geometric-tail") {
    config.ais_schedule = AisSchedule::geometric_tail;
  } else {
    throw ConfigError(kv.origin() + ": [eval].ais_schedule: unknown schedule '" + schedule + "'");
  }
  config.eval_sparseness = kv.get_bool("eval", "sparseness", true);
  config.eval_avg_log_prob = kv.get_bool("eval", "avg_log_prob", false);
  config.eval_linear_probe = kv.get_bool("eval", "linear_probe", false);
  config.probe.iterations = static_cast<int>(kv.get_int("eval", "probe_iterations", 300));
  config.probe.learning_rate = kv.get_double("eval", "probe_learning_rate", 0.5);
  if (config.ais_temperatures < 1) {
    throw ConfigError(kv.origin() + ": [eval].ais_temperatures: must be >= 1");
  }
  if (config.ais_chains < 2) {
    throw ConfigError(kv.origin() + ": [eval].ais_chains: must be >= 2");
  }

  return config;
}

RunConfig parse_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return run_config_from_text(buffer.str(), path);
}

Dataset load_train_dataset(const RunConfig& config) {
  Dataset data;
  if (config.data_kind == DataKind::idx) {
    data = config.labels_path.empty() ? load_idx(config.images_path)
                                      : load_idx(config.images_path, config.labels_path);
  } else {
    PatchSpec spec;
    spec.patch_size = config.patch_size;
    spec.count = config.patch_count;
    spec.whitening = config.whitening;
    for (const auto& entry : fs::directory_iterator(config.patch_dir)) {
      if (entry.path().extension() == ".pgm") spec.image_paths.push_back(entry.path().string());
    }
    std::sort(spec.image_paths.begin(), spec.image_paths.end());
    if (spec.image_paths.empty()) {
      throw ConfigError(config.patch_dir + ": no .pgm files found");
    }
    RngStream rng = RngStream::derive(config.seed, {20});
    data = extract_patches(spec, rng);
  }
  if (config.limit > 0 && config.limit < data.size()) {
    data = subset(data, config.limit, config.subset_seed);
  }
  if (config.num_visible > 0 && data.dim() != config.num_visible) {
    throw ConfigError("[model].visible = " + std::to_string(config.num_visible) +
                      " does not match data dimension " + std::to_string(data.dim()));
  }
  return data;
}

std::optional<Dataset> load_test_dataset(const RunConfig& config) {
  if (config.data_kind != DataKind::idx || config.test_images_path.empty()) return std::nullopt;
  Dataset data = config.test_labels_path.empty()
                     ? load_idx(config.test_images_path)
                     : load_idx(config.test_images_path, config.test_labels_path);
  if (config.test_limit > 0 && config.test_limit < data.size()) {
    data = subset(data, config.test_limit, derive_seed(config.subset_seed, {1}));
  }
  return data;
}

}  // namespace sgrbm
