#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace metafl {

// Flat vector of model parameters or a model update (delta). The common
// currency of aggregation, attacks, and policy math.
using ParamVec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double l2_norm(std::span<const double> v) {
  return std::sqrt(dot(v, v));
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline ParamVec scaled(std::span<const double> v, double alpha) {
  ParamVec out(v.begin(), v.end());
  for (double& x : out) x *= alpha;
  return out;
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline void require_finite(std::span<const double> v, const char* what) {
  if (!all_finite(v)) throw std::runtime_error(std::string(what) + ": non-finite entry");
}

inline void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace metafl
