#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dirichlet_mc/coordinate.hpp"

namespace dmc {

inline constexpr std::size_t kMaxQuadratureOrder = 128;
inline constexpr std::size_t kMaxQuadratureDim = 3;

/// Nodes and probability weights (summing to one) of a one-dimensional rule.
struct Rule1d {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Gauss-Hermite rule for the standard normal law (probabilists' Hermite).
Rule1d gauss_hermite(std::size_t order);

/// Gauss-Legendre rule for the uniform law on [0, 1].
Rule1d gauss_legendre(std::size_t order);

/// Gauss rule (`panels` == 0) or composite Gauss-Legendre with `panels`
/// equal cells. Composite rules cover [0,1] for mc_unit and
/// +-`truncation` standard deviations for ou_gaussian, weighted by the
/// Gaussian density; they resolve integrands much narrower than the
/// Gauss-Hermite node spacing.
struct QuadratureOptions {
  std::size_t order = 64;
  std::size_t panels = 0;
  double truncation = 12.0;
};

/// The rule for one coordinate. Throws for opaque coordinates and for custom
/// coordinates (no quadrature rule is known for their law).
Rule1d coordinate_rule(const CoordinateSpec& spec, const QuadratureOptions& opt);

/// Tensor-product grid: one column of `points` per node.
struct TensorGrid {
  Eigen::MatrixXd points;
  Eigen::VectorXd weights;

  std::size_t size() const { return static_cast<std::size_t>(weights.size()); }
};

TensorGrid tensor_grid(std::span<const CoordinateSpec> specs, const QuadratureOptions& opt);

using Integrand = std::function<double(const Eigen::VectorXd& coords)>;

/// E[integrand(U)] for U distributed per `specs` (at most three coordinates).
double quadrature_expectation(const Integrand& integrand, std::span<const CoordinateSpec> specs,
                              const QuadratureOptions& opt = {});

}  // namespace dmc
