#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "dirichlet_mc/estimators.hpp"
#include "dirichlet_mc/kernel.hpp"
#include "dirichlet_mc/scenarios.hpp"

using namespace dmc;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

TripleBatch single(double x, double gamma, double a) { return TripleBatch({ErrorTriple::scalar(x, gamma, a)}); }

QuadBatch gaussian_batch(std::size_t n, std::uint64_t seed) {
  return sample_quads(make_scenario("gaussian"), n, seed, 4);
}

}  // namespace

TEST(Kernel, ClosedFormValues) {
  EXPECT_NEAR(*gaussian_kernel(VectorXd::Zero(1), MatrixXd::Identity(1, 1)), kInvSqrt2Pi, 1e-15);
  const double v = *gaussian_kernel(VectorXd::Constant(1, 0.01), MatrixXd::Constant(1, 1, 0.01));
  EXPECT_NEAR(v, std::exp(-0.005) / std::sqrt(0.02 * std::numbers::pi), 1e-13);
  EXPECT_NEAR(v, 3.9695, 1e-4);
  EXPECT_NEAR(*gaussian_kernel(VectorXd::Zero(2), MatrixXd::Identity(2, 2)), 1.0 / (2 * std::numbers::pi), 1e-15);
}

TEST(Kernel, DegenerateAndIndefinite) {
  EXPECT_FALSE(gaussian_kernel(VectorXd::Zero(1), MatrixXd::Zero(1, 1)).has_value());
  MatrixXd rank1(2, 2);
  rank1 << 1, 1, 1, 1;
  EXPECT_FALSE(gaussian_kernel(VectorXd::Zero(2), rank1).has_value());
  EXPECT_TRUE(gaussian_kernel(VectorXd::Zero(2), rank1, DegeneratePolicy::ridge).has_value());
  MatrixXd bad(2, 2);
  bad << 1, 2, 2, 1;
  EXPECT_THROW(gaussian_kernel(VectorXd::Zero(2), bad), std::invalid_argument);
  EXPECT_THROW(gaussian_kernel(VectorXd::Zero(1), MatrixXd::Constant(1, 1, -1.0)), std::invalid_argument);
}

TEST(Kernel, FloatScalar) {
  const Eigen::VectorXf y = Eigen::VectorXf::Zero(1);
  const Eigen::MatrixXf c = Eigen::MatrixXf::Identity(1, 1);
  EXPECT_NEAR(*gaussian_kernel(y, c), static_cast<float>(kInvSqrt2Pi), 1e-6f);
}

// Trapezoidal integration over +-8 standard deviations.
TEST(Kernel, Normalization) {
  {
    const double mu = 0.3, var = 0.7, sd = std::sqrt(var);
    const int n = 4000;
    const double lo = mu - 8 * sd, step = 16 * sd / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double w = (i == 0 || i == n) ? 0.5 : 1.0;
      sum += w * *gaussian_kernel(VectorXd::Constant(1, lo + i * step - mu), MatrixXd::Constant(1, 1, var));
    }
    EXPECT_NEAR(sum * step, 1.0, 1e-6);
  }
  {
    MatrixXd cov(2, 2);
    cov << 1.0, 0.4, 0.4, 0.5;
    const int n = 400;
    const double l0 = 8.0, l1 = 8.0 * std::sqrt(0.5);
    const double s0 = 2 * l0 / n, s1 = 2 * l1 / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        const double w = ((i == 0 || i == n) ? 0.5 : 1.0) * ((j == 0 || j == n) ? 0.5 : 1.0);
        VectorXd y(2);
        y << -l0 + i * s0, -l1 + j * s1;
        sum += w * *gaussian_kernel(y, cov);
      }
    EXPECT_NEAR(sum * s0 * s1, 1.0, 1e-6);
  }
}

TEST(KernelEstimators, SingleSampleExamples) {
  const std::vector<double> zero{0.0}, off{0.01};
  EXPECT_NEAR(shifted_kernel_density(single(0, 1, 0), 1.0, scalar_points(zero))[0].value, kInvSqrt2Pi, 1e-15);
  const double shifted = shifted_kernel_density(single(0, 1, 1), 0.01, scalar_points(off))[0].value;
  EXPECT_NEAR(shifted, 1.0 / std::sqrt(0.02 * std::numbers::pi), 1e-12);
  EXPECT_NEAR(shifted, 3.9894, 1e-4);
  EXPECT_NEAR(plain_kernel_density(single(0, 1, 0), 1.0, scalar_points(zero), PlainKernel::identity_cov)[0].value,
              kInvSqrt2Pi, 1e-15);
  EXPECT_NEAR(plain_kernel_density(single(0, 4, 0), 1.0, scalar_points(zero), PlainKernel::gamma_cov)[0].value,
              kInvSqrt2Pi / 2, 1e-15);
}

TEST(KernelEstimators, DegenerateSamplesSkipped) {
  TripleBatch b({ErrorTriple::scalar(0, 0, 0), ErrorTriple::scalar(0, 1, 0)});
  const std::vector<double> zero{0.0};
  const auto est = shifted_kernel_density(b, 1.0, scalar_points(zero));
  EXPECT_EQ(est[0].skipped, 1u);
  EXPECT_EQ(est[0].n_used, 1u);
  EXPECT_NEAR(est[0].value, kInvSqrt2Pi, 1e-15);
  TripleBatch all_bad({ErrorTriple::scalar(0, 0, 0)});
  EXPECT_THROW(shifted_kernel_density(all_bad, 1.0, scalar_points(zero)), std::runtime_error);
}

TEST(KernelEstimators, InvalidSamplesCounted) {
  ErrorTriple nan = ErrorTriple::scalar(std::nan(""), 1, 0);
  TripleBatch b({nan, ErrorTriple::scalar(0, 1, 0)});
  EXPECT_EQ(b.size(), 1u);
  EXPECT_EQ(b.invalid_count(), 1u);
}

TEST(KernelEstimators, ShiftedMassIsOne) {
  const TripleBatch b = gaussian_batch(2000, 3).triples();
  std::vector<double> xs;
  const double lo = -9, step = 0.01;
  for (int i = 0; i <= 1800; ++i) xs.push_back(lo + i * step);
  const auto est = shifted_kernel_density(b, 0.2, scalar_points(xs));
  double sum = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) sum += ((i == 0 || i + 1 == est.size()) ? 0.5 : 1.0) * est[i].value;
  EXPECT_NEAR(sum * step, 1.0, 1e-6);
}

TEST(Direct, GaussianAtZero) {
  const QuadBatch b = gaussian_batch(100000, 1);
  const std::vector<double> xs{0.0};
  const DensityEstimate e = direct_density(b, xs)[0];
  EXPECT_LE(std::abs(e.value - kInvSqrt2Pi), 4 * e.std_error);
  EXPECT_EQ(e.n_used, 100000u);
}

TEST(Direct, FarTailIsCenteredWeight) {
  const QuadBatch b = gaussian_batch(100000, 2);
  const std::vector<double> xs{50.0};
  const DensityEstimate e = direct_density(b, xs)[0];
  EXPECT_LE(std::abs(e.value), 4 * e.std_error);
  const MeanEstimate w = weight_centering(b);
  EXPECT_NEAR(e.value, 0.5 * w.mean, 1e-15);
}

TEST(Direct, WeightValues) {
  ErrorQuad q;
  q.triple = ErrorTriple::scalar(0.0, 2.0, 0.5);
  q.gamma_x_gammax = 0.8;
  EXPECT_DOUBLE_EQ(*direct_weight(q), -0.8 / 4.0 + 2 * 0.5 / 2.0);
  EXPECT_DOUBLE_EQ(regularized_weight(q, 1.0), -0.8 / 9.0 + 2 * 0.5 / 3.0);
  q.triple = ErrorTriple::scalar(0.0, 0.0, 0.5);
  EXPECT_FALSE(direct_weight(q).has_value());
  EXPECT_EQ(sign_of(0.0), 0.0);
}

TEST(Regularized, ConstantGammaScaling) {
  const QuadBatch b = gaussian_batch(100000, 4);
  const std::vector<double> xs{0.0};
  const double eps = 0.5;
  const DensityEstimate d = direct_density(b, xs)[0];
  const DensityEstimate r = regularized_density(b, eps, xs)[0];
  EXPECT_NEAR(r.value, d.value / (1 + eps), 1e-12);
  EXPECT_LE(std::abs(r.value - kInvSqrt2Pi / (1 + eps)), 4 * r.std_error);
  EXPECT_NEAR(regularized_density(b, 1e12, xs)[0].value, 0.0, 1e-10);
}

TEST(Conditional, UnitAuxiliaryMatchesDirect) {
  ScenarioParams p;
  p.unit_aux = true;
  const QuadBatch b = sample_quads(make_scenario("lognormal", p), 20000, 6);
  const std::vector<double> xs{0.5, 1.0, 2.0};
  const auto c = conditional_expectation(b, xs);
  const auto d = direct_density(b, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EXPECT_EQ(c[i].numerator.value, d[i].value);
    EXPECT_EQ(c[i].density.value, d[i].value);
    EXPECT_EQ(c[i].ratio, 1.0);
  }
}

TEST(Conditional, IdentityAuxiliaryOnLognormal) {
  const QuadBatch b = sample_quads(make_scenario("lognormal"), 100000, 8, 4);
  const std::vector<double> xs{1.0};
  const ConditionalEstimate c = conditional_expectation(b, xs)[0];
  EXPECT_TRUE(c.reliable);
  EXPECT_LE(std::abs(c.ratio - 1.0), 4 * c.ratio_std_error);
}

TEST(Conditional, MissingAuxiliaryRejected) {
  QuadBatch b({quad_of(Jet2d::variable(0.0, 1, 0), BasePoint(make_specs({CoordinateSpec::ou_gaussian()}),
                                                              VectorXd::Zero(1)))});
  const std::vector<double> xs{0.0};
  EXPECT_THROW(conditional_expectation(b, xs), std::invalid_argument);
}

TEST(Centered, ForcedZeroMatchesSecondHalf) {
  const QuadBatch b = sample_quads(make_scenario("lognormal"), 20000, 9);
  const std::vector<ErrorQuad> second(b.samples().begin() + 10000, b.samples().end());
  const std::vector<double> xs{1.0};
  const DensityEstimate c = centered_direct_density(b, xs, 0.0)[0];
  const DensityEstimate d = direct_density(QuadBatch(second), xs)[0];
  EXPECT_EQ(c.value, d.value);
  EXPECT_EQ(c.std_error, d.std_error);
}

TEST(Centered, SymmetricCoefficientAndAgreement) {
  const QuadBatch b = gaussian_batch(100000, 10);
  const std::vector<double> xs{0.0};
  EXPECT_LT(std::abs(centered_coefficients(b, xs)[0]), 0.02);
  const DensityEstimate c = centered_direct_density(b, xs)[0];
  const DensityEstimate d = direct_density(b, xs)[0];
  EXPECT_LE(std::abs(c.value - d.value), 2 * std::hypot(c.std_error, d.std_error));
}

TEST(Centered, LowerVarianceOnLognormal) {
  const QuadBatch b = sample_quads(make_scenario("lognormal"), 100000, 11, 4);
  const std::vector<ErrorQuad> second(b.samples().begin() + 50000, b.samples().end());
  const std::vector<double> xs{1.0};
  const DensityEstimate c = centered_direct_density(b, xs)[0];
  const DensityEstimate d = direct_density(QuadBatch(second), xs)[0];
  EXPECT_LT(c.std_error, d.std_error);
}

TEST(Centered, MeanInvarianceAcrossSeeds) {
  const Scenario s = make_scenario("lognormal");
  const std::vector<double> xs{1.0};
  double diff = 0.0, var = 0.0;
  for (std::uint64_t seed = 100; seed < 150; ++seed) {
    const QuadBatch b = sample_quads(s, 4096, seed);
    const DensityEstimate c = centered_direct_density(b, xs)[0];
    const DensityEstimate d = direct_density(b, xs)[0];
    diff += c.value - d.value;
    var += c.std_error * c.std_error + d.std_error * d.std_error;
  }
  EXPECT_LE(std::abs(diff / 50), 3 * std::sqrt(var) / 50);
}

TEST(Identities, GaussianCosineIbp) {
  const QuadBatch b = gaussian_batch(100000, 12);
  EXPECT_LE(std::abs(ibp_residual(b, cosine_fn(), 0.5).z()), 4.0);
  EXPECT_LE(std::abs(ibp_residual(b, identity_fn(), 0.5).z()), 4.0);
  EXPECT_LE(std::abs(generator_centering(b, square_fn()).z()), 4.0);
}

TEST(Identities, TriangularSquareIbp) {
  const QuadBatch b = sample_quads(make_scenario("triangular"), 100000, 13, 4);
  EXPECT_LE(std::abs(ibp_residual(b, square_fn(), 0.1).z()), 4.0);
}

TEST(Identities, TestFunctionDerivatives) {
  for (const SmoothFn& f : {identity_fn(), square_fn(), cosine_fn()}) {
    for (double x : {-1.3, 0.2, 2.5}) {
      const double h = 1e-5;
      EXPECT_NEAR(f.d1(x), (f.f(x + h) - f.f(x - h)) / (2 * h), 1e-8);
      EXPECT_NEAR(f.d2(x), (f.d1(x + h) - f.d1(x - h)) / (2 * h), 1e-8);
    }
  }
}
