#include <CLI11.hpp>
#include <iostream>

#include "sgrbm/commands.hpp"
#include "sgrbm/errors.hpp"

namespace {

int dispatch(const std::function<void()>& command) {
  try {
    command();
    return sgrbm::cli::kExitOk;
  } catch (const sgrbm::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return sgrbm::cli::kExitNumeric;
  } catch (const sgrbm::EstimationError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return sgrbm::cli::kExitNumeric;
  } catch (const sgrbm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return sgrbm::cli::kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse group RBM / DBM training and evaluation"};
  app.require_subcommand(1);

  sgrbm::cli::TrainOptions train;
  std::string train_data, train_out;
  std::uint64_t train_seed = 0;
  auto* train_cmd = app.add_subcommand("train", "train a model from a config file");
  train_cmd->add_option("--config", train.config_path, "run config file")->required();
  auto* train_data_opt = train_cmd->add_option("--data", train_data, "override the training data path");
  auto* train_out_opt = train_cmd->add_option("--out", train_out, "override the output directory");
  auto* train_seed_opt =
      train_cmd->add_option("--seed-override", train_seed, "override the config seed");

  sgrbm::cli::EvalOptions eval;
  std::string eval_data, eval_out;
  std::uint64_t eval_seed = 0;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  eval_cmd->add_option("--checkpoint", eval.checkpoint_path, "model checkpoint")->required();
  eval_cmd->add_option("--config", eval.config_path, "run config file")->required();
  auto* eval_data_opt = eval_cmd->add_option("--data", eval_data, "evaluate on this IDX file");
  auto* eval_out_opt = eval_cmd->add_option("--out", eval_out, "override the output directory");
  auto* eval_seed_opt =
      eval_cmd->add_option("--seed-override", eval_seed, "override the config seed");

  sgrbm::cli::VisualizeOptions viz;
  auto* viz_cmd = app.add_subcommand("visualize", "export learned filters as a PGM tile grid");
  viz_cmd->add_option("--checkpoint", viz.checkpoint_path, "model checkpoint")->required();
  viz_cmd->add_option("--out", viz.out_path, "output PGM path")->required();
  viz_cmd->add_option("--shape", viz.shape, "visible layout ROWSxCOLS (default: square)");
  viz_cmd->add_option("--cols", viz.grid_cols, "tiles per grid row");

  sgrbm::cli::SampleOptions sample;
  auto* sample_cmd = app.add_subcommand("sample", "draw Gibbs samples into a PGM mosaic");
  sample_cmd->add_option("--checkpoint", sample.checkpoint_path, "model checkpoint")->required();
  sample_cmd->add_option("--out", sample.out_path, "output PGM path")->required();
  sample_cmd->add_option("--shape", sample.shape, "visible layout ROWSxCOLS (default: square)");
  sample_cmd->add_option("--chains", sample.chains, "number of chains");
  sample_cmd->add_option("--steps", sample.steps, "Gibbs steps per chain");
  sample_cmd->add_option("--thin", sample.thinning, "emit every Nth step (0 = final only)");
  sample_cmd->add_option("--seed-override", sample.seed, "sampling seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? sgrbm::cli::kExitOk : sgrbm::cli::kExitConfig;
  }

  if (train_cmd->parsed()) {
    if (*train_data_opt) train.data_override = train_data;
    if (*train_out_opt) train.out_override = train_out;
    if (*train_seed_opt) train.seed_override = train_seed;
    return dispatch([&] { sgrbm::cli::run_train(train); });
  }
  if (eval_cmd->parsed()) {
    if (*eval_data_opt) eval.data_override = eval_data;
    if (*eval_out_opt) eval.out_override = eval_out;
    if (*eval_seed_opt) eval.seed_override = eval_seed;
    return dispatch([&] { sgrbm::cli::run_eval(eval); });
  }
  if (viz_cmd->parsed()) {
    return dispatch([&] { sgrbm::cli::run_visualize(viz); });
  }
  return dispatch([&] { sgrbm::cli::run_sample(sample); });
}
