#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace sgrbm::cli {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;   // configuration / input errors
inline constexpr int kExitNumeric = 3;  // numerical failures

struct TrainOptions {
  std::string config_path;
  std::optional<std::string> data_override;
  std::optional<std::string> out_override;
  std::optional<std::uint64_t> seed_override;
};

struct EvalOptions {
  std::string checkpoint_path;
  std::string config_path;
  std::optional<std::string> data_override;
  std::optional<std::string> out_override;
  std::optional<std::uint64_t> seed_override;
};

struct VisualizeOptions {
  std::string checkpoint_path;
  std::string out_path;
  std::string shape;  // "RxC"; empty = square inferred from V
  int grid_cols = 0;  // 0 = derive from grouping / count
};

struct SampleOptions {
  std::string checkpoint_path;
  std::string out_path;
  std::string shape;  // "RxC"; empty = square inferred from V
  int chains = 16;
  int steps = 100;
  int thinning = 0;  // 0 = only the final step
  std::uint64_t seed = 1;
};

// Each command throws sgrbm exceptions on failure; main maps them to exit codes.
void run_train(const TrainOptions& options);
void run_eval(const EvalOptions& options);
void run_visualize(const VisualizeOptions& options);
void run_sample(const SampleOptions& options);

}  // namespace sgrbm::cli
