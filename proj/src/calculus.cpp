#include "dirichlet_mc/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace dmc {

namespace {

void require_same_space(const Jet2d& j, const BasePoint& base) {
  if (j.dim() != base.active_count())
    throw std::invalid_argument("jet spans " + std::to_string(j.dim()) + " coordinates, base point has " +
                                std::to_string(base.active_count()) + " active");
}

}  // namespace

ErrorTriple ErrorTriple::scalar(double x, double gamma, double a) {
  ErrorTriple t;
  t.x = Eigen::VectorXd::Constant(1, x);
  t.gamma = Eigen::MatrixXd::Constant(1, 1, gamma);
  t.a = Eigen::VectorXd::Constant(1, a);
  t.valid = std::isfinite(x) && std::isfinite(gamma) && std::isfinite(a) && gamma >= 0.0;
  return t;
}

bool ErrorTriple::consistent() const {
  const auto d = x.size();
  if (gamma.rows() != d || gamma.cols() != d || a.size() != d) return false;
  if (!x.allFinite() || !gamma.allFinite() || !a.allFinite()) return false;
  if (d == 0) return true;
  const double scale = std::max(1.0, gamma.cwiseAbs().maxCoeff());
  if ((gamma - gamma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) return false;
  const double floor = -1e-12 * std::max(1.0, gamma.trace());
  if (d == 1) return gamma(0, 0) >= floor;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gamma, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= floor;
}

Jet2d lift(const BasePoint& base, Eigen::Index i) {
  if (i < 0 || i >= base.size())
    throw std::out_of_range("lift: index out of range (coordinate " + std::to_string(i) + " of " +
                            std::to_string(base.size()) + ")");
  if (!base.spec(i).active())
    throw std::invalid_argument("lift: coordinate " + std::to_string(i) + " (" + base.spec(i).label +
                                ") is opaque and carries no error structure");
  return Jet2d::variable(base.coord(i), base.active_count(), base.slot(i));
}

Jet2d constant_jet(const BasePoint& base, double c) { return Jet2d::constant(c, base.active_count()); }

double gamma_of(const Jet2d& jx, const Jet2d& jy, const BasePoint& base) {
  require_same_space(jx, base);
  require_same_space(jy, base);
  return (jx.grad().array() * jy.grad().array() * base.weights().array()).sum();
}

double a_of(const Jet2d& jx, const BasePoint& base) {
  require_same_space(jx, base);
  return (jx.grad().array() * base.drifts().array() +
          0.5 * jx.hess().diagonal().array() * base.weights().array())
      .sum();
}

Eigen::VectorXd gamma_grad(const Jet2d& jx, const BasePoint& base) {
  require_same_space(jx, base);
  const Eigen::VectorXd weighted = jx.grad().cwiseProduct(base.weights());
  return 2.0 * (jx.hess() * weighted) +
         jx.grad().cwiseAbs2().cwiseProduct(base.weight_slopes());
}

double gamma_x_gammax(const Jet2d& jx, const BasePoint& base) {
  return gamma_grad(jx, base).dot(jx.grad().cwiseProduct(base.weights()));
}

ErrorQuad quad_of(const Jet2d& jx, const BasePoint& base) {
  ErrorQuad q;
  q.triple = ErrorTriple::scalar(jx.value(), gamma_of(jx, jx, base), a_of(jx, base));
  q.gamma_x_gammax = gamma_x_gammax(jx, base);
  q.triple.valid = q.triple.valid && jx.finite() && std::isfinite(q.gamma_x_gammax);
  return q;
}

ErrorQuad quad_of(const Jet2d& jx, const BasePoint& base, const Jet2d& jg) {
  ErrorQuad q = quad_of(jx, base);
  q.aux = AuxScalar{jg.value(), gamma_of(jx, jg, base)};
  q.triple.valid = q.triple.valid && jg.finite() && std::isfinite(q.aux->gamma_x_g);
  return q;
}

ErrorTriple triple_of(std::span<const Jet2d> components, const BasePoint& base) {
  const auto d = static_cast<Eigen::Index>(components.size());
  ErrorTriple t;
  t.x.resize(d);
  t.a.resize(d);
  t.gamma.resize(d, d);
  bool finite = true;
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto& ji = components[static_cast<std::size_t>(i)];
    finite = finite && ji.finite();
    t.x(i) = ji.value();
    t.a(i) = a_of(ji, base);
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double g = gamma_of(ji, components[static_cast<std::size_t>(j)], base);
      t.gamma(i, j) = g;
      t.gamma(j, i) = g;
    }
  }
  t.valid = finite && t.consistent();
  return t;
}

}  // namespace dmc
