#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

namespace dmc {

/// Determinants below this are treated as degenerate covariances.
inline constexpr double kDegenerateDeterminant = 1e-30;

enum class DegeneratePolicy {
  skip,   // the sample is dropped and counted
  ridge,  // cov + 1e-8 trace(cov) I
};

/// Centered Gaussian density g(y, cov) = (2 pi)^{-d/2} det(cov)^{-1/2}
/// exp(-y' cov^{-1} y / 2).
///
/// Returns nullopt for a degenerate covariance under DegeneratePolicy::skip.
/// Throws std::invalid_argument when cov is not positive semidefinite.
template <typename Derived, typename DerivedCov>
std::optional<typename Derived::Scalar> gaussian_kernel(const Eigen::MatrixBase<Derived>& y,
                                                        const Eigen::MatrixBase<DerivedCov>& cov,
                                                        DegeneratePolicy policy = DegeneratePolicy::skip) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const auto d = y.size();
  if (cov.rows() != d || cov.cols() != d) throw std::invalid_argument("gaussian_kernel: shape mismatch");

  const Scalar trace = cov.trace();
  const Scalar psd_floor = Scalar(-1e-12) * std::max(Scalar(1), std::abs(trace));

  if (d == 1) {
    Scalar v = cov(0, 0);
    if (v < psd_floor) throw std::invalid_argument("gaussian_kernel: covariance is not positive semidefinite");
    if (v < Scalar(kDegenerateDeterminant)) {
      if (policy == DegeneratePolicy::skip) return std::nullopt;
      v += Scalar(1e-8) * std::max(v, Scalar(0));
      if (!(v > Scalar(0))) return std::nullopt;
    }
    const Scalar y0 = y(0);
    return std::exp(Scalar(-0.5) * y0 * y0 / v) / std::sqrt(Scalar(2) * std::numbers::pi_v<Scalar> * v);
  }

  Matrix c = cov;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(c, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < psd_floor)
    throw std::invalid_argument("gaussian_kernel: covariance is not positive semidefinite");
  Scalar det = eig.eigenvalues().prod();
  if (!(det >= Scalar(kDegenerateDeterminant))) {
    if (policy == DegeneratePolicy::skip) return std::nullopt;
    c += Scalar(1e-8) * std::max(trace, Scalar(0)) * Matrix::Identity(d, d);
  }
  Eigen::LLT<Matrix> llt(c);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const auto& l = llt.matrixL();
  const Scalar logdet = Scalar(2) * l.toDenseMatrix().diagonal().array().log().sum();
  const Scalar quad = l.solve(y.derived()).squaredNorm();
  return std::exp(Scalar(-0.5) * (quad + logdet + Scalar(d) * std::log(Scalar(2) * std::numbers::pi_v<Scalar>)));
}

}  // namespace dmc
