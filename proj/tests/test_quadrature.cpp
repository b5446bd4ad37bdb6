#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "dirichlet_mc/quadrature.hpp"

using namespace dmc;
using Eigen::VectorXd;

namespace {
const std::vector<CoordinateSpec> kGauss{CoordinateSpec::ou_gaussian()};
}

TEST(Quadrature, ConstantIntegrand) {
  EXPECT_NEAR(quadrature_expectation([](const VectorXd&) { return 1.0; }, kGauss), 1.0, 1e-14);
  const std::vector<CoordinateSpec> three{CoordinateSpec::ou_gaussian(), CoordinateSpec::mc_unit(),
                                          CoordinateSpec::ou_gaussian(2.0)};
  QuadratureOptions opt;
  opt.order = 16;
  EXPECT_NEAR(quadrature_expectation([](const VectorXd&) { return 1.0; }, three, opt), 1.0, 1e-13);
}

TEST(Quadrature, GaussianMoments) {
  QuadratureOptions opt;
  opt.order = 32;
  EXPECT_NEAR(quadrature_expectation([](const VectorXd& u) { return u(0) * u(0); }, kGauss, opt), 1.0, 1e-12);
  opt.order = 64;
  EXPECT_NEAR(quadrature_expectation([](const VectorXd& u) { return std::exp(u(0)); }, kGauss, opt),
              std::exp(0.5), 1e-10);
}

TEST(Quadrature, ScaledVariance) {
  const std::vector<CoordinateSpec> specs{CoordinateSpec::ou_gaussian(0.25)};
  EXPECT_NEAR(quadrature_expectation([](const VectorXd& u) { return u(0) * u(0); }, specs), 0.25, 1e-13);
}

TEST(Quadrature, UnitInterval) {
  const std::vector<CoordinateSpec> specs{CoordinateSpec::mc_unit(), CoordinateSpec::mc_unit()};
  QuadratureOptions opt;
  opt.order = 8;
  EXPECT_NEAR(quadrature_expectation([](const VectorXd& u) { return u(0) * u(1) * u(1); }, specs, opt), 1.0 / 6.0,
              1e-15);
}

TEST(Quadrature, CompositeRuleAgrees) {
  QuadratureOptions opt{16, 200, 12.0};
  EXPECT_NEAR(quadrature_expectation([](const VectorXd& u) { return std::cos(u(0)); }, kGauss, opt),
              std::exp(-0.5), 1e-13);
  const Rule1d r = coordinate_rule(CoordinateSpec::ou_gaussian(), opt);
  EXPECT_EQ(r.nodes.size(), 16 * 200);
  EXPECT_NEAR(r.weights.sum(), 1.0, 1e-14);
}

TEST(Quadrature, RuleProperties) {
  for (std::size_t n : {1, 2, 5, 32, 128}) {
    const Rule1d h = gauss_hermite(n);
    EXPECT_NEAR(h.weights.sum(), 1.0, 1e-13) << n;
    EXPECT_TRUE((h.weights.array() > 0).all());
    const Rule1d l = gauss_legendre(n);
    EXPECT_NEAR(l.weights.sum(), 1.0, 1e-13) << n;
    EXPECT_GT(l.nodes.minCoeff(), 0.0);
    EXPECT_LT(l.nodes.maxCoeff(), 1.0);
  }
  EXPECT_THROW(gauss_hermite(0), std::invalid_argument);
  EXPECT_THROW(gauss_hermite(129), std::invalid_argument);
}

TEST(Quadrature, Rejections) {
  auto sampler = [](CounterStream& s) { return s.uniform(); };
  const std::vector<CoordinateSpec> opaque{CoordinateSpec::opaque(sampler)};
  EXPECT_THROW(quadrature_expectation([](const VectorXd&) { return 1.0; }, opaque), std::invalid_argument);
  const std::vector<CoordinateSpec> four(4, CoordinateSpec::ou_gaussian());
  EXPECT_THROW(quadrature_expectation([](const VectorXd&) { return 1.0; }, four), std::invalid_argument);
}
