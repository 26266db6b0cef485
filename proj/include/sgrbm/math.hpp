#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <vector>

namespace sgrbm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// log(1 + exp(t)) without overflow in either tail
inline double softplus(double t) {
  return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

inline Vector sigmoid(const Vector& v) {
  return v.unaryExpr([](double t) { return sigmoid(t); });
}

inline Matrix sigmoid(const Matrix& m) {
  return m.unaryExpr([](double t) { return sigmoid(t); });
}

inline Vector softplus(const Vector& v) {
  return v.unaryExpr([](double t) { return softplus(t); });
}

inline double log_sum_exp(const std::vector<double>& terms) {
  const double m = *std::max_element(terms.begin(), terms.end());
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - m);
  return m + std::log(acc);
}

}  // namespace sgrbm
