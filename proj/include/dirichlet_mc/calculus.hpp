#pragma once

#include <optional>
#include <span>

#include <Eigen/Dense>

#include "dirichlet_mc/coordinate.hpp"
#include "dirichlet_mc/jet.hpp"

namespace dmc {

/// (X, Gamma[X], A[X]) for an R^d-valued functional. `gamma` holds the
/// matrix Gamma[X_i, X_j].
struct ErrorTriple {
  Eigen::VectorXd x;
  Eigen::MatrixXd gamma;
  Eigen::VectorXd a;
  bool valid = true;

  Eigen::Index dim() const { return x.size(); }

  static ErrorTriple scalar(double x, double gamma, double a);

  /// Finite entries, symmetric gamma, eigenvalues >= -1e-12 max(1, trace).
  bool consistent() const;
};

/// A second tracked scalar G, used by the conditional-expectation formula.
struct AuxScalar {
  double value = 0.0;
  double gamma_x_g = 0.0;  // Gamma[X, G]
};

/// Scalar ErrorTriple extended with Gamma[X, Gamma[X]].
struct ErrorQuad {
  ErrorTriple triple;
  double gamma_x_gammax = 0.0;
  std::optional<AuxScalar> aux;

  double x() const { return triple.x(0); }
  double gamma() const { return triple.gamma(0, 0); }
  double a() const { return triple.a(0); }
  bool valid() const { return triple.valid; }
};

/// The jet of coordinate i (0-based). Opaque coordinates cannot be lifted.
Jet2d lift(const BasePoint& base, Eigen::Index i);

/// A constant over the base point's active coordinates.
Jet2d constant_jet(const BasePoint& base, double c);

/// Gamma[X, Y] = sum_i (d_i X)(d_i Y) gamma_i(u_i).
double gamma_of(const Jet2d& jx, const Jet2d& jy, const BasePoint& base);

/// A[X] = sum_i [ d_i X a_i(u_i) + 1/2 d_ii X gamma_i(u_i) ].
double a_of(const Jet2d& jx, const BasePoint& base);

/// Coordinate gradient of the field Gamma[X]:
/// d_j Gamma[X] = sum_i 2 d_i X d_ij X gamma_i + (d_j X)^2 gamma'_j.
Eigen::VectorXd gamma_grad(const Jet2d& jx, const BasePoint& base);

/// Gamma[X, Gamma[X]] = sum_j d_j X (d_j Gamma[X]) gamma_j.
double gamma_x_gammax(const Jet2d& jx, const BasePoint& base);

ErrorQuad quad_of(const Jet2d& jx, const BasePoint& base);
ErrorQuad quad_of(const Jet2d& jx, const BasePoint& base, const Jet2d& jg);

/// Triple of an R^d-valued functional given one jet per component.
ErrorTriple triple_of(std::span<const Jet2d> components, const BasePoint& base);

}  // namespace dmc
