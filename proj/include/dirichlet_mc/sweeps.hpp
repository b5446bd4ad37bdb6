#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dirichlet_mc/quadrature.hpp"
#include "dirichlet_mc/scenarios.hpp"

namespace dmc {

/// Kernel estimators a sweep can target.
enum class KernelEstimator { shifted, plain_gamma, plain_identity };

KernelEstimator parse_kernel_estimator(const std::string& name);
std::string to_string(KernelEstimator e);

struct SweepConfig {
  std::string scenario = "lognormal";
  KernelEstimator estimator = KernelEstimator::shifted;
  std::vector<double> epsilons;
  std::optional<std::size_t> samples;  // nullopt: evaluate expectations by quadrature
  std::vector<double> points{1.0};
  std::uint64_t seed = 1;
  unsigned workers = 1;
  ScenarioParams params;
  /// Composite rule used in quadrature mode; the quadrature error is
  /// estimated against the same rule with twice the panels.
  QuadratureOptions quadrature{16, 1000, 12.0};

  /// Throws std::invalid_argument unless epsilons are positive and strictly
  /// decreasing, points are non-empty, and Monte Carlo runs use N >= 1000.
  void validate() const;
};

struct SweepRow {
  double epsilon = 0.0;
  double n = 0.0;  // 0 in quadrature mode
  double x = 0.0;
  double estimate = 0.0;
  double reference = 0.0;
  double abs_error = 0.0;
  double std_error = 0.0;  // sampling error, or the quadrature error estimate
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<double> slopes;  // one per query point
  std::vector<std::string> notices;
};

/// Least-squares slope of log y against log x. Throws for fewer than two
/// points or non-positive coordinates.
double fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

/// Bias of the kernel estimator against the exact density; the slope is fitted
/// over the last four epsilons of |bias| versus eps.
SweepResult run_bias_sweep(const SweepConfig& cfg);

/// eps^{1/2} Var[g(x - X - eps A, eps Gamma)] against the reduced limit
/// f(x) / sqrt(4 pi gamma(x)); the slope is that of log Var versus log eps.
SweepResult run_variance_sweep(const SweepConfig& cfg);

/// The reduced variance constant f(x) / sqrt(4 pi gamma(x)).
double variance_limit(const Scenario& s, double x);

struct IdentityCheck {
  std::string name;       // generator_centering, ibp_residual, weight_centering
  std::string parameter;  // test function and/or eps
  MeanEstimate stat;
  bool passed = false;
};

struct IdentityReport {
  std::string scenario;
  std::vector<IdentityCheck> checks;
  bool passed() const;
};

inline constexpr double kIdentityZThreshold = 4.0;

/// z-scores of generator centering (phi in {x, x^2, cos}), the
/// integration-by-parts residual (phi in {cos, x^2}, eps in {0.5, 0.1}), and
/// weight centering; passes iff every |z| <= 4. `a_offset` is added to every
/// A[X] (injected-fault control).
IdentityReport run_identity_suite(const Scenario& s, std::size_t n, std::uint64_t seed, unsigned workers = 1,
                                  double a_offset = 0.0);

IdentityReport run_identity_suite(const QuadBatch& batch, const Scenario& s);

/// Mean-squared error of a kernel estimator with N samples at the best eps of
/// a grid, from quadrature-exact bias and variance.
struct RateRow {
  KernelEstimator estimator;
  double n = 0.0;
  double best_epsilon = 0.0;
  double bias = 0.0;
  double variance = 0.0;
  double mse = 0.0;
};

std::vector<RateRow> run_rate_table(const Scenario& s, double x, const std::vector<double>& sample_sizes,
                                    const QuadratureOptions& quad = {16, 1000, 12.0});

}  // namespace dmc
