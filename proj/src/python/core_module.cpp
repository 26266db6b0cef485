#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sgrbm/checkpoint.hpp"
#include "sgrbm/metrics.hpp"
#include "sgrbm/synth.hpp"
#include "sgrbm/train.hpp"

namespace py = pybind11;
using namespace sgrbm;

namespace {

RbmParams make_rbm_params(Matrix weights, Vector visible_bias, Vector hidden_bias,
                          const std::string& visible_type) {
  RbmParams params;
  params.weights = std::move(weights);
  params.visible_bias = std::move(visible_bias);
  params.hidden_bias = std::move(hidden_bias);
  params.visible_type = visible_type_from_string(visible_type);
  if (!params.shape_consistent()) throw DimensionError("inconsistent rbm shapes");
  return params;
}

Dataset make_dataset(Matrix items, std::vector<int> labels) {
  Dataset data;
  data.items = std::move(items);
  data.labels = std::move(labels);
  if (!data.labels.empty() &&
      static_cast<Eigen::Index>(data.labels.size()) != data.items.rows()) {
    throw DimensionError("label count does not match item count");
  }
  return data;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "sparse group RBM/DBM core operations";

  py::register_exception<Error>(m, "SgrbmError");

  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def_static(
          "derive",
          [](std::uint64_t master, std::uint64_t index) {
            return RngStream::derive(master, {index});
          },
          py::arg("master"), py::arg("index"))
      .def("uniform", &RngStream::uniform)
      .def("gaussian", &RngStream::gaussian);

  py::class_<RbmParams>(m, "RbmParams")
      .def(py::init(&make_rbm_params), py::arg("weights"), py::arg("visible_bias"),
           py::arg("hidden_bias"), py::arg("visible_type") = "binary")
      .def_readwrite("weights", &RbmParams::weights)
      .def_readwrite("visible_bias", &RbmParams::visible_bias)
      .def_readwrite("hidden_bias", &RbmParams::hidden_bias)
      .def_property_readonly("visible_type",
                             [](const RbmParams& p) { return std::string(to_string(p.visible_type)); })
      .def_property_readonly("num_visible", &RbmParams::num_visible)
      .def_property_readonly("num_hidden", &RbmParams::num_hidden);

  py::class_<GradientEstimate>(m, "GradientEstimate")
      .def_readonly("d_weights", &GradientEstimate::d_weights)
      .def_readonly("d_visible_bias", &GradientEstimate::d_visible_bias)
      .def_readonly("d_hidden_bias", &GradientEstimate::d_hidden_bias)
      .def_readonly("batch_size", &GradientEstimate::batch_size);

  py::class_<Grouping>(m, "Grouping")
      .def_static("uniform", &Grouping::uniform, py::arg("num_hidden"), py::arg("group_size"))
      .def_readonly("group_of", &Grouping::group_of)
      .def_readonly("groups", &Grouping::groups)
      .def_property_readonly("num_groups", &Grouping::num_groups);

  py::class_<RegularizerConfig>(m, "RegularizerConfig")
      .def(py::init([](const std::string& kind, double lambda, int group_size, double epsilon) {
             RegularizerConfig config;
             config.kind = regularizer_kind_from_string(kind);
             config.lambda = lambda;
             config.group_size = group_size;
             config.epsilon_norm = epsilon;
             return config;
           }),
           py::arg("kind") = "sparse_group", py::arg("lambda_") = 0.1, py::arg("group_size") = 5,
           py::arg("epsilon") = 1e-8)
      .def_readwrite("lambda_", &RegularizerConfig::lambda)
      .def_readwrite("group_size", &RegularizerConfig::group_size);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("momentum_initial", &TrainConfig::momentum_initial)
      .def_readwrite("momentum_final", &TrainConfig::momentum_final)
      .def_readwrite("momentum_switch_epoch", &TrainConfig::momentum_switch_epoch)
      .def_readwrite("weight_decay", &TrainConfig::weight_decay)
      .def_readwrite("cd_steps", &TrainConfig::cd_steps)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("weight_init_sigma", &TrainConfig::weight_init_sigma)
      .def_readwrite("seed", &TrainConfig::seed);

  // rbm operations
  m.def("energy", py::overload_cast<const RbmParams&, const Vector&, const Vector&>(&energy),
        py::arg("params"), py::arg("visible"), py::arg("hidden"));
  m.def("hidden_probabilities",
        py::overload_cast<const RbmParams&, const Matrix&>(&hidden_probabilities),
        py::arg("params"), py::arg("batch"));
  m.def("visible_probabilities",
        py::overload_cast<const RbmParams&, const Matrix&>(&visible_probabilities),
        py::arg("params"), py::arg("hidden_batch"));
  m.def("free_energy", &free_energy, py::arg("params"), py::arg("visible"));
  m.def("free_energies", &free_energies, py::arg("params"), py::arg("batch"));
  m.def("cd_gradient", &cd_gradient, py::arg("params"), py::arg("batch"), py::arg("cd_steps"),
        py::arg("rng"));

  // sparse group regularizer
  m.def("group_norms", &group_norms, py::arg("probs"), py::arg("grouping"));
  m.def("mixed_norm_penalty", &mixed_norm_penalty, py::arg("probs"), py::arg("grouping"));
  m.def("penalty_gradient", &penalty_gradient, py::arg("params"), py::arg("visible"),
        py::arg("grouping"), py::arg("config"));
  m.def("regularized_cd_gradient", &regularized_cd_gradient, py::arg("params"), py::arg("batch"),
        py::arg("cd_steps"), py::arg("grouping"), py::arg("config"), py::arg("rng"));

  // metrics
  m.def("exact_log_partition", &exact_log_partition, py::arg("params"));
  m.def(
      "ais_log_partition",
      [](const RbmParams& params, int num_temperatures, int num_chains, Vector base_bias,
         std::uint64_t seed) {
        AisConfig config;
        config.num_temperatures = num_temperatures;
        config.num_chains = num_chains;
        config.base_bias = std::move(base_bias);
        const AisEstimate est = ais_log_partition(params, config, seed);
        return py::dict(py::arg("log_z_mean") = est.log_z_mean,
                        py::arg("log_z_ci_low") = est.log_z_ci_low,
                        py::arg("log_z_ci_high") = est.log_z_ci_high,
                        py::arg("effective_sample_size") = est.effective_sample_size);
      },
      py::arg("params"), py::arg("num_temperatures") = 1000, py::arg("num_chains") = 100,
      py::arg("base_bias") = Vector(), py::arg("seed") = 0);
  m.def("avg_test_log_prob", &avg_test_log_prob, py::arg("params"), py::arg("test_set"),
        py::arg("log_z"));
  m.def("hoyer_sparseness", &hoyer_sparseness, py::arg("v"));
  m.def(
      "representation_sparseness",
      [](const RbmParams& params, const Matrix& data) {
        const SparsenessReport report = representation_sparseness(params, data);
        return py::dict(py::arg("values") = report.values, py::arg("min") = report.min,
                        py::arg("max") = report.max, py::arg("mean") = report.mean);
      },
      py::arg("params"), py::arg("data"));
  m.def("third_order_responsibility", &third_order_responsibility, py::arg("components"),
        py::arg("visible"), py::arg("temperature") = 1.0);
  m.def(
      "linear_probe",
      [](const Matrix& train_x, const std::vector<int>& train_y, const Matrix& test_x,
         const std::vector<int>& test_y, int num_classes) {
        return linear_probe(train_x, train_y, test_x, test_y, num_classes);
      },
      py::arg("train_features"), py::arg("train_labels"), py::arg("test_features"),
      py::arg("test_labels"), py::arg("num_classes"));

  // training
  m.def(
      "train_rbm",
      [](const Matrix& items, Eigen::Index num_hidden, const std::string& visible_type,
         const TrainConfig& train, const RegularizerConfig& reg) {
        Dataset data = make_dataset(items, {});
        return train_rbm(data, num_hidden, visible_type_from_string(visible_type), train, reg)
            .params;
      },
      py::arg("items"), py::arg("num_hidden"), py::arg("visible_type") = "binary",
      py::arg("train") = TrainConfig{}, py::arg("regularizer") = RegularizerConfig{});

  // data io
  m.def("load_idx", py::overload_cast<const std::string&>(&load_idx), py::arg("images_path"));
  m.def("load_idx_with_labels",
        [](const std::string& images, const std::string& labels) {
          const Dataset data = load_idx(images, labels);
          return py::make_tuple(data.items, data.labels);
        });
  m.def("save_idx_images", &save_idx_images, py::arg("path"), py::arg("items"), py::arg("rows"),
        py::arg("cols"));
  m.def("save_idx_labels", &save_idx_labels, py::arg("path"), py::arg("labels"));
  m.def(
      "synthetic_digits",
      [](int count, int size, std::uint64_t seed) {
        const Dataset data = synthetic_digits(count, size, seed);
        return py::make_tuple(data.items, data.labels);
      },
      py::arg("count"), py::arg("size") = 14, py::arg("seed") = 7);

  // checkpoints
  m.def(
      "save_rbm_checkpoint",
      [](const std::string& path, const RbmParams& params) {
        RbmCheckpoint ckpt;
        ckpt.params = params;
        save_checkpoint(path, ckpt);
      },
      py::arg("path"), py::arg("params"));
  m.def(
      "load_rbm_checkpoint",
      [](const std::string& path) { return load_rbm_checkpoint(path).params; }, py::arg("path"));

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("items", &Dataset::items)
      .def_readonly("labels", &Dataset::labels);
}
