#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace dmc {

/// Pairwise (cascade) summation; the reduction tree depends only on the
/// length, so results are reproducible.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double variance = 0.0;  // unbiased sample variance
  std::size_t n = 0;

  /// mean / std_error; 0 when both vanish.
  double z() const {
    if (std_error > 0.0) return mean / std_error;
    return mean == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), mean);
  }
};

inline MeanEstimate mean_estimate(std::span<const double> v) {
  MeanEstimate e;
  e.n = v.size();
  if (v.empty()) return e;
  e.mean = pairwise_sum(v) / static_cast<double>(v.size());
  if (v.size() > 1) {
    std::vector<double> dev(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) dev[i] = (v[i] - e.mean) * (v[i] - e.mean);
    e.variance = pairwise_sum(dev) / static_cast<double>(v.size() - 1);
    e.std_error = std::sqrt(e.variance / static_cast<double>(v.size()));
  }
  return e;
}

}  // namespace dmc
