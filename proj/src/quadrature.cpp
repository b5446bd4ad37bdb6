#include "dirichlet_mc/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace dmc {

namespace {

void check_order(std::size_t order) {
  if (order == 0 || order > kMaxQuadratureOrder)
    throw std::invalid_argument("quadrature: order must lie in [1, " + std::to_string(kMaxQuadratureOrder) + "]");
}

// Golub-Welsch for a monic three-term recurrence with zero diagonal and
// off-diagonal sqrt(beta_k), followed by Newton polishing of each node on the
// orthonormal recurrence. Weights are the Christoffel numbers 1 / sum p_k^2,
// which stay accurate where the eigenvector components underflow.
template <class Beta>
Rule1d symmetric_gauss(std::size_t order, Beta beta) {
  const auto n = static_cast<Eigen::Index>(order);
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) {
    const double b = std::sqrt(beta(k));
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi, Eigen::EigenvaluesOnly);
  Rule1d rule{eig.eigenvalues(), Eigen::VectorXd(n)};

  // p_k orthonormal: sqrt(beta_{k+1}) p_{k+1} = x p_k - sqrt(beta_k) p_{k-1}
  auto evaluate = [&](double x, double& pn, double& dpn, double& christoffel) {
    double p_prev = 0.0, p = 1.0, dp_prev = 0.0, dp = 0.0;
    christoffel = 1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double sb_next = std::sqrt(beta(k + 1));
      const double sb = k > 0 ? std::sqrt(beta(k)) : 0.0;
      const double p_next = (x * p - sb * p_prev) / sb_next;
      const double dp_next = (p + x * dp - sb * dp_prev) / sb_next;
      p_prev = p;
      p = p_next;
      dp_prev = dp;
      dp = dp_next;
      if (k + 1 < n) christoffel += p * p;
    }
    pn = p;
    dpn = dp;
  };

  for (Eigen::Index i = 0; i < n; ++i) {
    double x = rule.nodes(i), pn = 0, dpn = 0, c = 0;
    for (int it = 0; it < 3; ++it) {
      evaluate(x, pn, dpn, c);
      if (dpn != 0.0) x -= pn / dpn;
    }
    evaluate(x, pn, dpn, c);
    rule.nodes(i) = x;
    rule.weights(i) = 1.0 / c;
  }
  // Enforce exact symmetry of the rule.
  for (Eigen::Index i = 0; i < n / 2; ++i) {
    const Eigen::Index j = n - 1 - i;
    const double x = 0.5 * (rule.nodes(j) - rule.nodes(i));
    const double w = 0.5 * (rule.weights(i) + rule.weights(j));
    rule.nodes(i) = -x;
    rule.nodes(j) = x;
    rule.weights(i) = rule.weights(j) = w;
  }
  if (n % 2 == 1) rule.nodes(n / 2) = 0.0;
  rule.weights /= rule.weights.sum();
  return rule;
}

Rule1d composite_legendre(double lo, double hi, std::size_t panels, std::size_t order) {
  const Rule1d base = gauss_legendre(order);
  const auto per = base.nodes.size();
  Rule1d r{Eigen::VectorXd(per * static_cast<Eigen::Index>(panels)),
           Eigen::VectorXd(per * static_cast<Eigen::Index>(panels))};
  const double width = (hi - lo) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double left = lo + width * static_cast<double>(p);
    const auto off = static_cast<Eigen::Index>(p) * per;
    r.nodes.segment(off, per) = left + width * base.nodes.array();
    r.weights.segment(off, per) = width * base.weights;
  }
  return r;
}

}  // namespace

Rule1d gauss_hermite(std::size_t order) {
  check_order(order);
  return symmetric_gauss(order, [](Eigen::Index k) { return static_cast<double>(k); });
}

Rule1d gauss_legendre(std::size_t order) {
  check_order(order);
  Rule1d r = symmetric_gauss(order, [](Eigen::Index k) {
    const double kk = static_cast<double>(k);
    return kk * kk / (4.0 * kk * kk - 1.0);
  });
  r.nodes = 0.5 * (r.nodes.array() + 1.0);
  return r;
}

Rule1d coordinate_rule(const CoordinateSpec& spec, const QuadratureOptions& opt) {
  switch (spec.kind) {
    case CoordinateKind::ou_gaussian: {
      const double sd = std::sqrt(spec.variance);
      if (opt.panels == 0) {
        Rule1d r = gauss_hermite(opt.order);
        r.nodes *= sd;
        return r;
      }
      Rule1d r = composite_legendre(-opt.truncation, opt.truncation, opt.panels, opt.order);
      const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
      r.weights.array() *= norm * (-0.5 * r.nodes.array().square()).exp();
      r.nodes *= sd;
      return r;
    }
    case CoordinateKind::mc_unit:
      if (opt.panels == 0) return gauss_legendre(opt.order);
      return composite_legendre(0.0, 1.0, opt.panels, opt.order);
    case CoordinateKind::opaque:
    case CoordinateKind::custom:
      break;
  }
  throw std::invalid_argument("quadrature: no rule for " + to_string(spec.kind) + " coordinate '" + spec.label +
                              "'");
}

TensorGrid tensor_grid(std::span<const CoordinateSpec> specs, const QuadratureOptions& opt) {
  if (specs.empty() || specs.size() > kMaxQuadratureDim)
    throw std::invalid_argument("quadrature: between 1 and " + std::to_string(kMaxQuadratureDim) +
                                " coordinates supported");
  std::vector<Rule1d> rules;
  for (const auto& s : specs) rules.push_back(coordinate_rule(s, opt));
  Eigen::Index total = 1;
  for (const auto& r : rules) total *= r.nodes.size();
  const auto dim = static_cast<Eigen::Index>(specs.size());
  TensorGrid g{Eigen::MatrixXd(dim, total), Eigen::VectorXd(total)};
  std::vector<Eigen::Index> idx(specs.size(), 0);
  for (Eigen::Index k = 0; k < total; ++k) {
    double w = 1.0;
    for (Eigen::Index d = 0; d < dim; ++d) {
      const auto& r = rules[static_cast<std::size_t>(d)];
      g.points(d, k) = r.nodes(idx[static_cast<std::size_t>(d)]);
      w *= r.weights(idx[static_cast<std::size_t>(d)]);
    }
    g.weights(k) = w;
    for (Eigen::Index d = dim - 1; d >= 0; --d) {
      auto& i = idx[static_cast<std::size_t>(d)];
      if (++i < rules[static_cast<std::size_t>(d)].nodes.size()) break;
      i = 0;
    }
  }
  return g;
}

double quadrature_expectation(const Integrand& integrand, std::span<const CoordinateSpec> specs,
                              const QuadratureOptions& opt) {
  const TensorGrid g = tensor_grid(specs, opt);
  double sum = 0.0;
  Eigen::VectorXd u(g.points.rows());
  for (Eigen::Index k = 0; k < g.points.cols(); ++k) {
    u = g.points.col(k);
    sum += g.weights(k) * integrand(u);
  }
  return sum;
}

}  // namespace dmc
