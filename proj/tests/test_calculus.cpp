#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dirichlet_mc/calculus.hpp"
#include "dirichlet_mc/coordinate.hpp"
#include "dirichlet_mc/jet.hpp"
#include "dirichlet_mc/stats.hpp"

using namespace dmc;
using Eigen::VectorXd;

namespace {

BasePoint point(std::vector<CoordinateSpec> specs, std::vector<double> u) {
  return BasePoint(make_specs(std::move(specs)), Eigen::Map<VectorXd>(u.data(), static_cast<Eigen::Index>(u.size())));
}

}  // namespace

TEST(Jet, LiftMcUnit) {
  const BasePoint b = point({CoordinateSpec::mc_unit()}, {0.5});
  const Jet2d j = lift(b, 0);
  EXPECT_EQ(j.value(), 0.5);
  EXPECT_EQ(j.grad()(0), 1.0);
  EXPECT_EQ(j.hess()(0, 0), 0.0);
}

TEST(Jet, LiftSecondCoordinate) {
  const BasePoint b = point({CoordinateSpec::ou_gaussian(), CoordinateSpec::ou_gaussian()}, {1.0, 2.0});
  const Jet2d j = lift(b, 1);
  EXPECT_EQ(j.value(), 2.0);
  EXPECT_EQ(j.grad()(0), 0.0);
  EXPECT_EQ(j.grad()(1), 1.0);
  EXPECT_TRUE(j.hess().isZero());
}

TEST(Jet, LiftOutOfRange) {
  const BasePoint b = point({CoordinateSpec::ou_gaussian(), CoordinateSpec::ou_gaussian()}, {1.0, 2.0});
  try {
    lift(b, 2);
    FAIL() << "expected out_of_range";
  } catch (const std::out_of_range& e) {
    EXPECT_NE(std::string(e.what()).find("index out of range"), std::string::npos);
  }
}

TEST(Jet, LiftOpaqueRejected) {
  auto sampler = [](CounterStream& s) { return s.uniform(); };
  const BasePoint b = point({CoordinateSpec::ou_gaussian(), CoordinateSpec::opaque(sampler)}, {0.0, 0.3});
  EXPECT_EQ(b.active_count(), 1);
  EXPECT_THROW(lift(b, 1), std::invalid_argument);
}

TEST(Jet, ActiveCap) {
  std::vector<CoordinateSpec> specs(kMaxActiveCoordinates + 1, CoordinateSpec::ou_gaussian());
  std::vector<double> u(specs.size(), 0.0);
  EXPECT_THROW(point(specs, u), std::invalid_argument);
}

TEST(Jet, UnaryFunctions) {
  const Jet2d x = Jet2d::variable(0.0, 1, 0);
  const Jet2d e = exp(x);
  EXPECT_DOUBLE_EQ(e.value(), 1.0);
  EXPECT_DOUBLE_EQ(e.grad()(0), 1.0);
  EXPECT_DOUBLE_EQ(e.hess()(0, 0), 1.0);

  const Jet2d y = Jet2d::variable(3.0, 1, 0);
  const Jet2d sq = apply(y, SmoothFn{[](double v) { return v * v; }, [](double v) { return 2 * v; },
                                     [](double) { return 2.0; }});
  EXPECT_EQ(sq.value(), 9.0);
  EXPECT_EQ(sq.grad()(0), 6.0);
  EXPECT_EQ(sq.hess()(0, 0), 2.0);

  const Jet2d id = apply(y, SmoothFn{[](double v) { return v; }, [](double) { return 1.0; },
                                     [](double) { return 0.0; }});
  EXPECT_EQ(id.value(), y.value());
  EXPECT_EQ(id.grad(), y.grad());
  EXPECT_EQ(id.hess(), y.hess());
}

TEST(Jet, Arithmetic) {
  const BasePoint b = point({CoordinateSpec::mc_unit(), CoordinateSpec::mc_unit()}, {0.5, 0.5});
  const Jet2d s = lift(b, 0) + lift(b, 1);
  EXPECT_EQ(s.value(), 1.0);
  EXPECT_EQ(s.grad()(0), 1.0);
  EXPECT_EQ(s.grad()(1), 1.0);

  const Jet2d j = sin(lift(b, 0)) * lift(b, 1);
  const Jet2d one = constant_jet(b, 1.0);
  const Jet2d k = j * one;
  EXPECT_EQ(k.value(), j.value());
  EXPECT_EQ(k.grad(), j.grad());
  EXPECT_EQ(k.hess(), j.hess());

  const Jet2d u = Jet2d::variable(3.0, 1, 0);
  const Jet2d p = u * u;
  EXPECT_EQ(p.value(), 9.0);
  EXPECT_EQ(p.grad()(0), 6.0);
  EXPECT_EQ(p.hess()(0, 0), 2.0);
}

TEST(Jet, NonFiniteFlag) {
  const Jet2d x = Jet2d::variable(-1.0, 1, 0);
  EXPECT_TRUE(x.finite());
  EXPECT_FALSE(log(x).finite());
  EXPECT_FALSE((1.0 / (x + 1.0)).finite());
}

TEST(Calculus, GammaExamples) {
  const BasePoint mc = point({CoordinateSpec::mc_unit()}, {0.5});
  EXPECT_DOUBLE_EQ(gamma_of(lift(mc, 0), lift(mc, 0), mc), 1.0 / 16.0);
  EXPECT_EQ(gamma_of(constant_jet(mc, 2.0), constant_jet(mc, 2.0), mc), 0.0);

  const BasePoint g = point({CoordinateSpec::ou_gaussian(1.0)}, {0.0});
  const Jet2d x = exp(lift(g, 0));
  EXPECT_DOUBLE_EQ(gamma_of(x, x, g), 1.0);
}

TEST(Calculus, GeneratorExamples) {
  const BasePoint mc = point({CoordinateSpec::mc_unit()}, {0.25});
  EXPECT_DOUBLE_EQ(a_of(lift(mc, 0), mc), 3.0 / 32.0);
  EXPECT_EQ(a_of(constant_jet(mc, 5.0), mc), 0.0);

  const BasePoint g = point({CoordinateSpec::ou_gaussian(1.0)}, {0.0});
  EXPECT_DOUBLE_EQ(a_of(exp(lift(g, 0)), g), 0.5);
}

TEST(Calculus, GammaGradientExamples) {
  const BasePoint g = point({CoordinateSpec::ou_gaussian(1.0)}, {0.0});
  EXPECT_EQ(gamma_grad(lift(g, 0), g)(0), 0.0);
  EXPECT_DOUBLE_EQ(gamma_grad(exp(lift(g, 0)), g)(0), 2.0);
}

TEST(Calculus, QuadExamples) {
  const BasePoint g = point({CoordinateSpec::ou_gaussian(1.0)}, {0.0});
  EXPECT_EQ(quad_of(lift(g, 0), g).gamma_x_gammax, 0.0);
  const ErrorQuad e = quad_of(exp(lift(g, 0)), g);
  EXPECT_DOUBLE_EQ(e.gamma_x_gammax, 2.0);
  EXPECT_DOUBLE_EQ(e.x(), 1.0);
  EXPECT_DOUBLE_EQ(e.gamma(), 1.0);
  EXPECT_DOUBLE_EQ(e.a(), 0.5);

  const BasePoint mc = point({CoordinateSpec::mc_unit()}, {0.5});
  EXPECT_EQ(quad_of(lift(mc, 0), mc).gamma_x_gammax, 0.0);
}

TEST(Calculus, QuadWithAuxiliary) {
  const BasePoint b = point({CoordinateSpec::ou_gaussian(), CoordinateSpec::ou_gaussian()}, {0.3, -0.7});
  const Jet2d g = sin(lift(b, 1));
  const Jet2d x = lift(b, 0) + g;
  const ErrorQuad q = quad_of(x, b, g);
  ASSERT_TRUE(q.aux.has_value());
  EXPECT_DOUBLE_EQ(q.aux->value, std::sin(-0.7));
  EXPECT_NEAR(q.aux->gamma_x_g, std::cos(-0.7) * std::cos(-0.7), 1e-15);
}

TEST(Calculus, TripleOfTwoComponents) {
  const BasePoint b = point({CoordinateSpec::ou_gaussian(), CoordinateSpec::ou_gaussian()}, {0.2, 0.4});
  const std::vector<Jet2d> comps{lift(b, 0) + lift(b, 1), lift(b, 0) - lift(b, 1)};
  const ErrorTriple t = triple_of(comps, b);
  EXPECT_EQ(t.dim(), 2);
  EXPECT_DOUBLE_EQ(t.gamma(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(t.gamma(1, 1), 2.0);
  EXPECT_DOUBLE_EQ(t.gamma(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(t.a(0), -0.3);
  EXPECT_DOUBLE_EQ(t.a(1), 0.1);
  EXPECT_TRUE(t.consistent());
}

TEST(Calculus, SampleBaseDeterministic) {
  const SpecList specs = make_specs({CoordinateSpec::ou_gaussian(), CoordinateSpec::mc_unit()});
  CounterStream s1(7, 3), s2(7, 3);
  const BasePoint a = sample_base(specs, s1);
  const BasePoint b = sample_base(specs, s2);
  EXPECT_EQ(a.coords(), b.coords());
  EXPECT_GE(a.coord(1), 0.0);
  EXPECT_LE(a.coord(1), 1.0);
}

TEST(Calculus, OuGaussianDrawsCentered) {
  const SpecList specs = make_specs({CoordinateSpec::ou_gaussian()});
  CounterStream s(11, 0);
  std::vector<double> v(1000000);
  for (auto& x : v) x = sample_base(specs, s).coord(0);
  const MeanEstimate m = mean_estimate(v);
  EXPECT_LT(std::abs(m.mean), 4.0 / std::sqrt(1e6));
}

// Random functionals over up to four coordinates, compared with central
// finite differences of the scalar map u -> F(u).
namespace {

struct RandomFunctional {
  int kind;
  double c0, c1, c2;
  template <typename T>
  T operator()(const std::vector<T>& u) const {
    const std::size_t m = u.size();
    switch (kind % 4) {
      case 0:
        return exp(u[0] * c0) * (u[m - 1] + c1);
      case 1:
        return sin(u[0] + u[m - 1] * c1) + u[0] * u[0] * c2;
      case 2:
        return sqrt(u[0] * u[0] + c0 * c0 + 1.0) * cos(u[m - 1] * c2);
      default: {
        T acc = u[0] * c0;
        for (std::size_t i = 1; i < m; ++i) acc += u[i] * u[i - 1] * c1;
        return acc / (u[m - 1] * u[m - 1] + 1.0 + c2 * c2);
      }
    }
  }
};

double fd_first(const std::function<double(const std::vector<double>&)>& f, std::vector<double> u, std::size_t i,
                double h) {
  const double u0 = u[i];
  u[i] = u0 + h;
  const double fp = f(u);
  u[i] = u0 - h;
  const double fm = f(u);
  return (fp - fm) / (2 * h);
}

double fd_second(const std::function<double(const std::vector<double>&)>& f, std::vector<double> u, std::size_t i,
                 double h) {
  const double f0 = f(u);
  const double u0 = u[i];
  u[i] = u0 + h;
  const double fp = f(u);
  u[i] = u0 - h;
  const double fm = f(u);
  return (fp - 2 * f0 + fm) / (h * h);
}

}  // namespace

TEST(CalculusProperty, MatchesFiniteDifferences) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_int_distribution<int> dims(1, 4);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = dims(rng);
    std::vector<CoordinateSpec> specs;
    std::vector<double> u;
    for (int i = 0; i < m; ++i) {
      if ((trial + i) % 2 == 0) {
        specs.push_back(CoordinateSpec::ou_gaussian(0.5 + 0.5 * std::abs(coef(rng))));
        u.push_back(coef(rng));
      } else {
        specs.push_back(CoordinateSpec::mc_unit());
        u.push_back(0.2 + 0.6 * std::abs(coef(rng)));
      }
    }
    const RandomFunctional fn{trial, coef(rng), coef(rng), coef(rng)};
    const BasePoint b = point(specs, u);
    std::vector<Jet2d> lifts;
    for (int i = 0; i < m; ++i) lifts.push_back(lift(b, i));
    const Jet2d jx = fn(lifts);
    auto scalar = [&](const std::vector<double>& v) { return fn(v); };

    double gamma_fd = 0.0, a_fd = 0.0;
    for (int i = 0; i < m; ++i) {
      const double d1 = fd_first(scalar, u, i, 1e-4);
      const double d2 = fd_second(scalar, u, i, 1e-4);
      gamma_fd += d1 * d1 * b.weights()(i);
      a_fd += d1 * b.drifts()(i) + 0.5 * d2 * b.weights()(i);
    }
    const double gamma = gamma_of(jx, jx, b);
    const double a = a_of(jx, b);
    EXPECT_NEAR(gamma, gamma_fd, 1e-6 * std::max(1.0, std::abs(gamma))) << "trial " << trial;
    EXPECT_NEAR(a, a_fd, 1e-5 * std::max(1.0, std::abs(a))) << "trial " << trial;

    // Gamma[X, Gamma[X]] against a finite-difference gradient of the Gamma field.
    auto gamma_field = [&](const std::vector<double>& v) {
      const BasePoint bv = point(specs, v);
      std::vector<Jet2d> lv;
      for (int i = 0; i < m; ++i) lv.push_back(lift(bv, i));
      const Jet2d j = fn(lv);
      return gamma_of(j, j, bv);
    };
    double gxg_fd = 0.0;
    for (int i = 0; i < m; ++i) gxg_fd += jx.grad()(i) * fd_first(gamma_field, u, i, 1e-5) * b.weights()(i);
    const double gxg = gamma_x_gammax(jx, b);
    EXPECT_NEAR(gxg, gxg_fd, 1e-5 * std::max(1.0, std::abs(gxg))) << "trial " << trial;
  }
}

TEST(CalculusProperty, BilinearityAndPositivity) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 25; ++trial) {
    const BasePoint b = point({CoordinateSpec::ou_gaussian(), CoordinateSpec::mc_unit(), CoordinateSpec::ou_gaussian(2.0)},
                              {n01(rng), 0.5 + 0.3 * std::tanh(n01(rng)), n01(rng)});
    const Jet2d u0 = lift(b, 0), u1 = lift(b, 1), u2 = lift(b, 2);
    const Jet2d x = sin(u0) * u1;
    const Jet2d y = exp(u2 * 0.3) + u0 * u1;
    const Jet2d z = cos(u1 + u2);
    const double lhs = gamma_of(x + y, z, b);
    const double rhs = gamma_of(x, z, b) + gamma_of(y, z, b);
    EXPECT_NEAR(lhs, rhs, 1e-13 * std::max(1.0, std::abs(lhs)));
    EXPECT_GE(gamma_of(x, x, b), 0.0);
    EXPECT_EQ(gamma_of(constant_jet(b, 3.0), z, b), 0.0);
  }
}

TEST(CalculusProperty, FunctionalCalculusIdentity) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 25; ++trial) {
    const BasePoint b = point({CoordinateSpec::ou_gaussian(), CoordinateSpec::mc_unit()},
                              {n01(rng), 0.5 + 0.3 * std::tanh(n01(rng))});
    const Jet2d x = lift(b, 0) * lift(b, 1) + sin(lift(b, 0));
    const double v = x.value();
    const Jet2d phi_x = sin(x) * 2.0;
    const double lhs = a_of(phi_x, b);
    const double rhs = 2.0 * std::cos(v) * a_of(x, b) - 0.5 * 2.0 * std::sin(v) * gamma_of(x, x, b);
    EXPECT_NEAR(lhs, rhs, 1e-13 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(Calculus, ConsistentRejectsIndefinite) {
  ErrorTriple t;
  t.x = VectorXd::Zero(2);
  t.a = VectorXd::Zero(2);
  t.gamma = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_TRUE(t.consistent());
  t.gamma(0, 1) = t.gamma(1, 0) = 2.0;
  EXPECT_FALSE(t.consistent());
  t.gamma(0, 1) = 0.5;
  EXPECT_FALSE(t.consistent());
}
