#include "sgrbm/metrics.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "sgrbm/errors.hpp"
#include "sgrbm/rbm.hpp"

namespace sgrbm {

namespace {

constexpr int kEnumerationBudget = 24;  // max V + H for exact operations
constexpr int kEnumerationSideLimit = 20;

void require_enumerable(const RbmParams& params) {
  if (params.visible_type != VisibleType::binary) {
    throw UnsupportedError("exact enumeration requires binary visible units");
  }
  if (params.num_visible() + params.num_hidden() > kEnumerationBudget) {
    throw ParameterError("enumeration refused: V + H = " +
                         std::to_string(params.num_visible() + params.num_hidden()) +
                         " exceeds budget " + std::to_string(kEnumerationBudget));
  }
}

// Streaming log-sum-exp accumulator.
struct LogSumExp {
  double max_term = -std::numeric_limits<double>::infinity();
  double acc = 0.0;

  void add(double t) {
    if (t <= max_term) {
      acc += std::exp(t - max_term);
    } else {
      acc = acc * std::exp(max_term - t) + 1.0;
      max_term = t;
    }
  }
  double value() const {
    if (!std::isfinite(max_term)) return max_term;
    return max_term + std::log(acc);
  }
};

// Visits all 2^n bit configurations in Gray-code order. flip(bit, now_set) is
// called before visit(state_bits) for every configuration after the first.
template <typename Flip, typename Visit>
void gray_walk(int n, Flip&& flip, Visit&& visit) {
  const std::uint64_t total = std::uint64_t{1} << n;
  std::uint64_t gray = 0;
  visit(gray);
  for (std::uint64_t idx = 1; idx < total; ++idx) {
    const std::uint64_t next = idx ^ (idx >> 1);
    const std::uint64_t diff = next ^ gray;
    const int bit = std::countr_zero(diff);
    gray = next;
    flip(bit, (gray >> bit) & 1ULL);
    visit(gray);
  }
}

}  // namespace

double exact_log_partition_over_hidden(const RbmParams& params) {
  require_enumerable(params);
  const int h = static_cast<int>(params.num_hidden());
  if (h > kEnumerationSideLimit) {
    throw ParameterError("enumeration refused: H exceeds side limit");
  }

  Vector act = params.visible_bias;  // (W h + b) for the current h
  double hidden_term = 0.0;          // c . h
  LogSumExp lse;
  gray_walk(
      h,
      [&](int j, bool now_set) {
        const double sign = now_set ? 1.0 : -1.0;
        act += sign * params.weights.col(j);
        hidden_term += sign * params.hidden_bias[j];
      },
      [&](std::uint64_t) {
        double experts = 0.0;
        for (Eigen::Index i = 0; i < act.size(); ++i) experts += softplus(act[i]);
        lse.add(hidden_term + experts);
      });
  return lse.value();
}

double exact_log_partition_over_visible(const RbmParams& params) {
  require_enumerable(params);
  const int v = static_cast<int>(params.num_visible());
  if (v > kEnumerationSideLimit) {
    throw ParameterError("enumeration refused: V exceeds side limit");
  }

  Vector act = params.hidden_bias;  // (W^T x + c) for the current x
  double visible_term = 0.0;        // b . x
  LogSumExp lse;
  gray_walk(
      v,
      [&](int i, bool now_set) {
        const double sign = now_set ? 1.0 : -1.0;
        act += sign * params.weights.row(i).transpose();
        visible_term += sign * params.visible_bias[i];
      },
      [&](std::uint64_t) {
        double experts = 0.0;
        for (Eigen::Index j = 0; j < act.size(); ++j) experts += softplus(act[j]);
        lse.add(visible_term + experts);
      });
  return lse.value();
}

double exact_log_partition(const RbmParams& params) {
  require_enumerable(params);
  return params.num_hidden() <= params.num_visible() ? exact_log_partition_over_hidden(params)
                                                     : exact_log_partition_over_visible(params);
}

ModelExpectations exact_model_expectations(const RbmParams& params) {
  require_enumerable(params);
  const double log_z = exact_log_partition(params);
  const auto v = params.num_visible();
  const auto h = params.num_hidden();

  ModelExpectations out;
  out.visible_hidden = Matrix::Zero(v, h);
  out.visible = Vector::Zero(v);
  out.hidden = Vector::Zero(h);

  if (h <= v) {
    Vector act = params.visible_bias;
    Vector hidden = Vector::Zero(h);
    gray_walk(
        static_cast<int>(h),
        [&](int j, bool now_set) {
          const double sign = now_set ? 1.0 : -1.0;
          act += sign * params.weights.col(j);
          hidden[j] = now_set ? 1.0 : 0.0;
        },
        [&](std::uint64_t) {
          double log_term = hidden.dot(params.hidden_bias);
          for (Eigen::Index i = 0; i < v; ++i) log_term += softplus(act[i]);
          const double prob = std::exp(log_term - log_z);
          const Vector cond = sigmoid(act);
          out.visible_hidden += prob * (cond * hidden.transpose());
          out.visible += prob * cond;
          out.hidden += prob * hidden;
        });
  } else {
    Vector act = params.hidden_bias;
    Vector visible = Vector::Zero(v);
    gray_walk(
        static_cast<int>(v),
        [&](int i, bool now_set) {
          const double sign = now_set ? 1.0 : -1.0;
          act += sign * params.weights.row(i).transpose();
          visible[i] = now_set ? 1.0 : 0.0;
        },
        [&](std::uint64_t) {
          double log_term = visible.dot(params.visible_bias);
          for (Eigen::Index j = 0; j < h; ++j) log_term += softplus(act[j]);
          const double prob = std::exp(log_term - log_z);
          const Vector cond = sigmoid(act);
          out.visible_hidden += prob * (visible * cond.transpose());
          out.visible += prob * visible;
          out.hidden += prob * cond;
        });
  }
  return out;
}

GradientEstimate exact_log_likelihood_gradient(const RbmParams& params, const Matrix& batch) {
  const auto batch_size = batch.rows();
  if (batch_size == 0) throw ParameterError("exact_log_likelihood_gradient: empty batch");
  const double scale = 1.0 / static_cast<double>(batch_size);

  const Matrix pos_hidden = hidden_probabilities(params, batch);
  const ModelExpectations model = exact_model_expectations(params);

  GradientEstimate grad;
  grad.d_weights = scale * (batch.transpose() * pos_hidden) - model.visible_hidden;
  grad.d_visible_bias = scale * batch.colwise().sum().transpose() - model.visible;
  grad.d_hidden_bias = scale * pos_hidden.colwise().sum().transpose() - model.hidden;
  grad.batch_size = batch_size;
  return grad;
}

double exact_mean_log_likelihood(const RbmParams& params, const Matrix& batch) {
  const double log_z = exact_log_partition(params);
  return -free_energies(params, batch).mean() - log_z;
}

std::vector<double> ais_schedule(AisSchedule schedule, int num_temperatures) {
  if (num_temperatures < 1) throw ParameterError("ais_schedule: need at least one temperature");
  std::vector<double> betas(static_cast<std::size_t>(num_temperatures) + 1);
  if (schedule == AisSchedule::linear || num_temperatures < 10) {
    for (int t = 0; t <= num_temperatures; ++t) {
      betas[static_cast<std::size_t>(t)] = static_cast<double>(t) / num_temperatures;
    }
  } else {
    // Linear up to 0.9 over the first 70% of steps, then 1 - beta decays
    // geometrically toward the final exact 1.0.
    const int linear_steps = std::max(1, (7 * num_temperatures) / 10);
    const int tail_steps = num_temperatures - linear_steps;
    for (int t = 0; t <= linear_steps; ++t) {
      betas[static_cast<std::size_t>(t)] = 0.9 * static_cast<double>(t) / linear_steps;
    }
    if (tail_steps > 0) {
      const double start_gap = 0.1;
      const double end_gap = std::min(start_gap / 2.0, 1.0 / (10.0 * num_temperatures));
      const double ratio = std::pow(end_gap / start_gap, 1.0 / tail_steps);
      double gap = start_gap;
      for (int t = 1; t < tail_steps; ++t) {
        gap *= ratio;
        betas[static_cast<std::size_t>(linear_steps + t)] = 1.0 - gap;
      }
      betas[static_cast<std::size_t>(num_temperatures)] = 1.0;
    }
  }
  for (std::size_t t = 1; t < betas.size(); ++t) {
    if (!(betas[t] > betas[t - 1])) throw NumericError("ais schedule is not strictly increasing");
  }
  return betas;
}

Vector fit_base_bias(const Matrix& data) {
  if (data.rows() == 0) throw ParameterError("fit_base_bias: empty data");
  const Vector means = data.colwise().mean().transpose();
  Vector bias(means.size());
  for (Eigen::Index i = 0; i < means.size(); ++i) {
    const double p = std::min(std::max(means[i], 1e-3), 1.0 - 1e-3);
    bias[i] = std::log(p / (1.0 - p));
  }
  return bias;
}

AisEstimate ais_log_partition(const RbmParams& params, const AisConfig& config,
                              std::uint64_t seed) {
  if (params.visible_type != VisibleType::binary) {
    throw UnsupportedError("ais_log_partition supports binary visible units only");
  }
  if (config.num_chains < 2) throw ParameterError("ais requires at least 2 chains");
  const auto v = params.num_visible();
  const auto h = params.num_hidden();

  Vector base_bias = config.base_bias;
  if (base_bias.size() == 0) base_bias = Vector::Zero(v);
  if (base_bias.size() != v) throw DimensionError("ais base bias length mismatch");

  const std::vector<double> betas = ais_schedule(config.schedule, config.num_temperatures);

  // log f_beta(x) = (1-beta) a.x + beta b.x + sum_j softplus(beta (W.x + c)_j)
  const Vector base_probs = sigmoid(base_bias);
  double log_z_base = static_cast<double>(h) * std::log(2.0);
  for (Eigen::Index i = 0; i < v; ++i) log_z_base += softplus(base_bias[i]);

  std::vector<double> log_weights(static_cast<std::size_t>(config.num_chains));
  for (int m = 0; m < config.num_chains; ++m) {
    RngStream rng = RngStream::derive(seed, {static_cast<std::uint64_t>(m)});
    Vector x = sample_bernoulli(base_probs, rng);
    Vector act = params.weights.transpose() * x + params.hidden_bias;
    double base_dot = base_bias.dot(x);
    double model_dot = params.visible_bias.dot(x);

    double log_w = 0.0;
    for (std::size_t t = 1; t < betas.size(); ++t) {
      const double beta_prev = betas[t - 1];
      const double beta = betas[t];

      double delta = (beta_prev - beta) * base_dot + (beta - beta_prev) * model_dot;
      for (Eigen::Index j = 0; j < h; ++j) {
        delta += softplus(beta * act[j]) - softplus(beta_prev * act[j]);
      }
      log_w += delta;

      // One block Gibbs sweep at inverse temperature beta.
      Vector hidden(h);
      for (Eigen::Index j = 0; j < h; ++j) {
        hidden[j] = rng.uniform() < sigmoid(beta * act[j]) ? 1.0 : 0.0;
      }
      const Vector visible_act = params.weights * hidden;
      for (Eigen::Index i = 0; i < v; ++i) {
        const double p =
            sigmoid(beta * (visible_act[i] + params.visible_bias[i]) + (1.0 - beta) * base_bias[i]);
        x[i] = rng.uniform() < p ? 1.0 : 0.0;
      }
      act = params.weights.transpose() * x + params.hidden_bias;
      base_dot = base_bias.dot(x);
      model_dot = params.visible_bias.dot(x);
    }
    if (!std::isfinite(log_w)) throw EstimationError("non-finite ais importance weight");
    log_weights[static_cast<std::size_t>(m)] = log_w;
  }

  const double max_lw = *std::max_element(log_weights.begin(), log_weights.end());
  if (!std::isfinite(max_lw)) throw EstimationError("degenerate ais weights");
  const double n = static_cast<double>(config.num_chains);
  double sum_r = 0.0, sum_r2 = 0.0;
  for (double lw : log_weights) {
    const double r = std::exp(lw - max_lw);
    sum_r += r;
    sum_r2 += r * r;
  }
  const double mean_r = sum_r / n;
  double var_r = 0.0;
  for (double lw : log_weights) {
    const double d = std::exp(lw - max_lw) - mean_r;
    var_r += d * d;
  }
  var_r /= (n - 1.0);
  const double std_err = std::sqrt(var_r / n);
  const double sigma_log = std_err / mean_r;  // delta method around log(mean)

  double mean_lw = 0.0, var_lw = 0.0;
  for (double lw : log_weights) mean_lw += lw;
  mean_lw /= n;
  for (double lw : log_weights) var_lw += (lw - mean_lw) * (lw - mean_lw);
  var_lw /= (n - 1.0);

  AisEstimate est;
  est.log_z_mean = log_z_base + max_lw + std::log(mean_r);
  est.log_z_ci_low = est.log_z_mean - 3.0 * sigma_log;
  est.log_z_ci_high = est.log_z_mean + 3.0 * sigma_log;
  est.effective_sample_size = (sum_r * sum_r) / sum_r2;
  est.log_weight_std = std::sqrt(var_lw);
  return est;
}

double avg_test_log_prob(const RbmParams& params, const Matrix& test_set, double log_z) {
  if (test_set.rows() == 0) throw ParameterError("avg_test_log_prob: empty test set");
  return -free_energies(params, test_set).mean() - log_z;
}

double hoyer_sparseness(const Vector& v) {
  const auto d = v.size();
  if (d < 2) throw ParameterError("hoyer_sparseness is undefined for D < 2");
  const double l2 = v.norm();
  if (l2 == 0.0) throw ParameterError("hoyer_sparseness is undefined for the all-zero vector");
  const double l1 = v.cwiseAbs().sum();
  const double sqrt_d = std::sqrt(static_cast<double>(d));
  const double raw = (sqrt_d - l1 / l2) / (sqrt_d - 1.0);
  // The exact value lies in [0, 1]; strip off rounding dust at the endpoints.
  return std::clamp(raw, 0.0, 1.0);
}

SparsenessReport summarize_sparseness(std::vector<double> values) {
  if (values.empty()) throw ParameterError("sparseness report needs at least one value");
  SparsenessReport report;
  report.min = values[0];
  report.max = values[0];
  double sum = 0.0;
  for (double s : values) {
    report.min = std::min(report.min, s);
    report.max = std::max(report.max, s);
    sum += s;
  }
  report.mean = sum / static_cast<double>(values.size());
  report.values = std::move(values);
  return report;
}

SparsenessReport representation_sparseness(const RbmParams& params, const Matrix& data) {
  const Matrix probs = hidden_probabilities(params, data);
  std::vector<double> values(static_cast<std::size_t>(probs.rows()));
  for (Eigen::Index l = 0; l < probs.rows(); ++l) {
    values[static_cast<std::size_t>(l)] = hoyer_sparseness(probs.row(l).transpose());
  }
  return summarize_sparseness(std::move(values));
}

SparsenessReport representation_sparseness(const RbmParams& params, const Matrix& data,
                                           const Grouping& grouping) {
  const Matrix probs = hidden_probabilities(params, data);
  std::vector<double> values(static_cast<std::size_t>(probs.rows()));
  for (Eigen::Index l = 0; l < probs.rows(); ++l) {
    values[static_cast<std::size_t>(l)] =
        hoyer_sparseness(group_norms(probs.row(l).transpose(), grouping));
  }
  return summarize_sparseness(std::move(values));
}

Vector third_order_responsibility(const std::vector<RbmParams>& components, const Vector& visible,
                                  double temperature) {
  if (components.empty()) throw ParameterError("third_order_responsibility: no components");
  if (temperature <= 0.0) throw ParameterError("temperature must be positive");
  const auto k = static_cast<Eigen::Index>(components.size());
  Vector scores(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const RbmParams& comp = components[static_cast<std::size_t>(c)];
    if (comp.num_visible() != visible.size()) {
      throw DimensionError("third_order_responsibility: component visible size mismatch");
    }
    const Vector act = comp.weights.transpose() * visible + comp.hidden_bias;
    scores[c] = softplus(act).sum() / temperature;
  }
  const double max_score = scores.maxCoeff();
  Vector out = (scores.array() - max_score).exp();
  out /= out.sum();
  return out;
}

double linear_probe(const Matrix& train_features, const std::vector<int>& train_labels,
                    const Matrix& test_features, const std::vector<int>& test_labels,
                    int num_classes, const LinearProbeConfig& config) {
  const auto n_train = train_features.rows();
  const auto n_test = test_features.rows();
  const auto dim = train_features.cols();
  if (static_cast<Eigen::Index>(train_labels.size()) != n_train ||
      static_cast<Eigen::Index>(test_labels.size()) != n_test) {
    throw DimensionError("linear_probe: label count does not match feature count");
  }
  if (test_features.cols() != dim) throw DimensionError("linear_probe: feature width mismatch");
  if (num_classes < 2) throw ParameterError("linear_probe: need at least 2 classes");
  for (int y : train_labels) {
    if (y < 0 || y >= num_classes) throw ParameterError("linear_probe: label out of range");
  }
  for (int y : test_labels) {
    if (y < 0 || y >= num_classes) throw ParameterError("linear_probe: label out of range");
  }

  Matrix onehot = Matrix::Zero(n_train, num_classes);
  for (Eigen::Index i = 0; i < n_train; ++i) onehot(i, train_labels[static_cast<std::size_t>(i)]) = 1.0;

  Matrix theta = Matrix::Zero(dim, num_classes);
  Vector bias = Vector::Zero(num_classes);
  Matrix vel_theta = Matrix::Zero(dim, num_classes);
  Vector vel_bias = Vector::Zero(num_classes);
  const double scale = 1.0 / static_cast<double>(n_train);

  auto softmax_rows = [](Matrix logits) {
    const Vector row_max = logits.rowwise().maxCoeff();
    logits.colwise() -= row_max;
    Matrix p = logits.array().exp();
    const Vector sums = p.rowwise().sum();
    p.array().colwise() /= sums.array();
    return p;
  };

  for (int it = 0; it < config.iterations; ++it) {
    Matrix logits = train_features * theta;
    logits.rowwise() += bias.transpose();
    const Matrix probs = softmax_rows(std::move(logits));
    const Matrix diff = scale * (probs - onehot);
    const Matrix grad_theta = train_features.transpose() * diff + config.l2 * theta;
    const Vector grad_bias = diff.colwise().sum().transpose();

    vel_theta = config.momentum * vel_theta - config.learning_rate * grad_theta;
    vel_bias = config.momentum * vel_bias - config.learning_rate * grad_bias;
    theta += vel_theta;
    bias += vel_bias;
  }

  Matrix logits = test_features * theta;
  logits.rowwise() += bias.transpose();
  Eigen::Index correct = 0;
  for (Eigen::Index i = 0; i < n_test; ++i) {
    Eigen::Index predicted;
    logits.row(i).maxCoeff(&predicted);
    if (static_cast<int>(predicted) == test_labels[static_cast<std::size_t>(i)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(n_test);
}

}  // namespace sgrbm
