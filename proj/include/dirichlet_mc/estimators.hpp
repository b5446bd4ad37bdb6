#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dirichlet_mc/calculus.hpp"
#include "dirichlet_mc/jet.hpp"
#include "dirichlet_mc/kernel.hpp"
#include "dirichlet_mc/stats.hpp"

namespace dmc {

/// Independent draws of an ErrorTriple with a common dimension. Invalid
/// (non-finite or inconsistent) draws are dropped and counted.
class TripleBatch {
public:
  TripleBatch() = default;
  explicit TripleBatch(std::vector<ErrorTriple> draws);

  const std::vector<ErrorTriple>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  std::size_t invalid_count() const { return invalid_; }
  Eigen::Index dim() const { return samples_.empty() ? 0 : samples_.front().dim(); }

private:
  std::vector<ErrorTriple> samples_;
  std::size_t invalid_ = 0;
};

/// Independent scalar ErrorQuad draws.
class QuadBatch {
public:
  QuadBatch() = default;
  explicit QuadBatch(std::vector<ErrorQuad> draws);

  const std::vector<ErrorQuad>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  std::size_t invalid_count() const { return invalid_; }
  bool has_aux() const;

  TripleBatch triples() const;

private:
  std::vector<ErrorQuad> samples_;
  std::size_t invalid_ = 0;
};

struct DensityEstimate {
  Eigen::VectorXd x;
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_used = 0;
  std::size_t skipped = 0;  // samples excluded by the estimator (degenerate or Gamma = 0)
  std::optional<double> epsilon;

  double point() const { return x(0); }
};

using QueryPoints = std::vector<Eigen::VectorXd>;

QueryPoints scalar_points(std::span<const double> xs);

/// f-hat(x) = mean g(x - X_n - eps A_n, eps Gamma_n).
std::vector<DensityEstimate> shifted_kernel_density(const TripleBatch& b, double eps, const QueryPoints& xs,
                                                    DegeneratePolicy policy = DegeneratePolicy::skip);

enum class PlainKernel { identity_cov, gamma_cov };

/// Baselines without the generator shift: g(x - X_n, eps I) or g(x - X_n, eps Gamma_n).
std::vector<DensityEstimate> plain_kernel_density(const TripleBatch& b, double eps, const QueryPoints& xs,
                                                  PlainKernel variant,
                                                  DegeneratePolicy policy = DegeneratePolicy::skip);

/// sign with sign(0) = 0.
inline double sign_of(double v) { return (v > 0.0) - (v < 0.0); }

/// The weight W = Gamma[X, 1/Gamma[X]] + 2 A[X] / Gamma[X], nullopt when Gamma = 0.
std::optional<double> direct_weight(const ErrorQuad& q);

/// The regularised weight Gamma[X, 1/(eps+Gamma)] + 2 A / (eps + Gamma).
double regularized_weight(const ErrorQuad& q, double eps);

/// f(x) = E[sign(x - X) W] / 2.
std::vector<DensityEstimate> direct_density(const QuadBatch& b, std::span<const double> xs);

/// The eps-regularised version, increasing to the l.s.c. density as eps decreases.
std::vector<DensityEstimate> regularized_density(const QuadBatch& b, double eps, std::span<const double> xs);

struct ConditionalEstimate {
  double x = 0.0;
  DensityEstimate numerator;  // f(x) E[G | X = x]
  DensityEstimate density;    // f(x)
  double ratio = 0.0;         // E[G | X = x]
  double ratio_std_error = 0.0;
  bool reliable = true;  // false when |density| <= 2 std errors
};

std::vector<ConditionalEstimate> conditional_expectation(const QuadBatch& b, std::span<const double> xs);

/// Control-variate version of direct_density: the first half of the batch
/// fixes c*(x) = sum sign W^2 / sum W^2, the second half is averaged with
/// (sign(x - X) - c*(x)) W. `forced_c` overrides the fitted coefficient.
std::vector<DensityEstimate> centered_direct_density(const QuadBatch& b, std::span<const double> xs,
                                                     std::optional<double> forced_c = std::nullopt);

/// The fitted coefficients c*(x) used by centered_direct_density.
std::vector<double> centered_coefficients(const QuadBatch& b, std::span<const double> xs);

/// Residual of E[phi''(X) Gamma/(eps+Gamma)] + E[phi'(X) (Gamma[X, 1/(eps+Gamma)] + 2A/(eps+Gamma))].
MeanEstimate ibp_residual(const QuadBatch& b, const SmoothFn& phi, double eps);

/// E[phi'(X) A[X] + phi''(X) Gamma[X] / 2], i.e. E[A[phi(X)]].
MeanEstimate generator_centering(const QuadBatch& b, const SmoothFn& phi);

/// Mean of the direct weight (or the regularised one when eps is given).
MeanEstimate weight_centering(const QuadBatch& b, std::optional<double> eps = std::nullopt);

/// Test functions for the identity checks.
SmoothFn identity_fn();
SmoothFn square_fn();
SmoothFn cosine_fn();

}  // namespace dmc
