#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dmc {

/// Second-order forward jet of a scalar functional of m coordinates:
/// value, gradient, and dense symmetric Hessian.
///
/// Jets carry a finiteness flag instead of throwing, so a single bad sample
/// can be detected and excluded downstream.
template <typename Scalar>
class Jet2 {
public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Index = Eigen::Index;

  Jet2() = default;

  Jet2(Scalar value, Vector grad, Matrix hess)
      : value_(value), grad_(std::move(grad)), hess_(std::move(hess)) {
    if (hess_.rows() != grad_.size() || hess_.cols() != grad_.size())
      throw std::invalid_argument("Jet2: Hessian shape does not match gradient length");
    refresh_finite(true);
  }

  static Jet2 constant(Scalar c, Index m) { return Jet2(c, Vector::Zero(m), Matrix::Zero(m, m)); }

  /// The coordinate function u_i itself: gradient e_i, zero Hessian.
  static Jet2 variable(Scalar u, Index m, Index i) {
    if (i < 0 || i >= m) throw std::out_of_range("Jet2: index out of range");
    Vector g = Vector::Zero(m);
    g(i) = Scalar(1);
    return Jet2(u, std::move(g), Matrix::Zero(m, m));
  }

  Scalar value() const { return value_; }
  const Vector& grad() const { return grad_; }
  const Matrix& hess() const { return hess_; }
  Index dim() const { return grad_.size(); }
  bool finite() const { return finite_; }

  /// Chain rule for phi(jet) given phi, phi', phi'' evaluated at value().
  Jet2 compose(Scalar f0, Scalar f1, Scalar f2) const {
    Jet2 out;
    out.value_ = f0;
    out.grad_ = f1 * grad_;
    out.hess_ = f2 * (grad_ * grad_.transpose()) + f1 * hess_;
    out.refresh_finite(finite_);
    return out;
  }

  Jet2& operator+=(const Jet2& o) {
    check_dim(o);
    value_ += o.value_;
    grad_ += o.grad_;
    hess_ += o.hess_;
    refresh_finite(finite_ && o.finite_);
    return *this;
  }

  Jet2& operator-=(const Jet2& o) {
    check_dim(o);
    value_ -= o.value_;
    grad_ -= o.grad_;
    hess_ -= o.hess_;
    refresh_finite(finite_ && o.finite_);
    return *this;
  }

  Jet2& operator*=(const Jet2& o) {
    check_dim(o);
    Matrix cross = grad_ * o.grad_.transpose();
    hess_ = hess_ * o.value_ + value_ * o.hess_ + cross + cross.transpose();
    grad_ = grad_ * o.value_ + value_ * o.grad_;
    value_ *= o.value_;
    refresh_finite(finite_ && o.finite_);
    return *this;
  }

  Jet2& operator/=(const Jet2& o) { return *this *= o.reciprocal(); }

  Jet2& operator+=(Scalar c) {
    value_ += c;
    refresh_finite(finite_);
    return *this;
  }
  Jet2& operator*=(Scalar c) {
    value_ *= c;
    grad_ *= c;
    hess_ *= c;
    refresh_finite(finite_);
    return *this;
  }

  Jet2 reciprocal() const {
    const Scalar inv = Scalar(1) / value_;
    return compose(inv, -inv * inv, Scalar(2) * inv * inv * inv);
  }

  Jet2 operator-() const {
    Jet2 out(*this);
    out *= Scalar(-1);
    return out;
  }

private:
  void check_dim(const Jet2& o) const {
    if (o.dim() != dim())
      throw std::invalid_argument("Jet2: dimension mismatch (" + std::to_string(dim()) + " vs " +
                                  std::to_string(o.dim()) + ")");
  }

  void refresh_finite(bool inputs_finite) {
    finite_ = inputs_finite && std::isfinite(value_) && grad_.allFinite() && hess_.allFinite();
  }

  Scalar value_{};
  Vector grad_;
  Matrix hess_;
  bool finite_ = true;
};

using Jet2d = Jet2<double>;

template <typename S> Jet2<S> operator+(Jet2<S> a, const Jet2<S>& b) { return a += b; }
template <typename S> Jet2<S> operator-(Jet2<S> a, const Jet2<S>& b) { return a -= b; }
template <typename S> Jet2<S> operator*(Jet2<S> a, const Jet2<S>& b) { return a *= b; }
template <typename S> Jet2<S> operator/(Jet2<S> a, const Jet2<S>& b) { return a /= b; }
template <typename S> Jet2<S> operator+(Jet2<S> a, S c) { return a += c; }
template <typename S> Jet2<S> operator+(S c, Jet2<S> a) { return a += c; }
template <typename S> Jet2<S> operator-(Jet2<S> a, S c) { return a += -c; }
template <typename S> Jet2<S> operator-(S c, const Jet2<S>& a) { return -a + c; }
template <typename S> Jet2<S> operator*(Jet2<S> a, S c) { return a *= c; }
template <typename S> Jet2<S> operator*(S c, Jet2<S> a) { return a *= c; }
template <typename S> Jet2<S> operator/(Jet2<S> a, S c) { return a *= S(1) / c; }
template <typename S> Jet2<S> operator/(S c, const Jet2<S>& a) { return a.reciprocal() * c; }

/// A scalar function packaged with its first two derivatives.
template <typename Scalar>
struct SmoothFunction {
  std::function<Scalar(Scalar)> f;
  std::function<Scalar(Scalar)> d1;
  std::function<Scalar(Scalar)> d2;

  Scalar operator()(Scalar x) const { return f(x); }
};

using SmoothFn = SmoothFunction<double>;

template <typename S>
Jet2<S> apply(const Jet2<S>& j, const SmoothFunction<S>& phi) {
  const S v = j.value();
  return j.compose(phi.f(v), phi.d1(v), phi.d2(v));
}

template <typename S> Jet2<S> exp(const Jet2<S>& j) {
  const S e = std::exp(j.value());
  return j.compose(e, e, e);
}
template <typename S> Jet2<S> log(const Jet2<S>& j) {
  const S v = j.value();
  return j.compose(std::log(v), S(1) / v, S(-1) / (v * v));
}
template <typename S> Jet2<S> sin(const Jet2<S>& j) {
  const S s = std::sin(j.value()), c = std::cos(j.value());
  return j.compose(s, c, -s);
}
template <typename S> Jet2<S> cos(const Jet2<S>& j) {
  const S s = std::sin(j.value()), c = std::cos(j.value());
  return j.compose(c, -s, -c);
}
template <typename S> Jet2<S> sqrt(const Jet2<S>& j) {
  const S r = std::sqrt(j.value());
  return j.compose(r, S(0.5) / r, S(-0.25) / (r * j.value()));
}
template <typename S> Jet2<S> square(const Jet2<S>& j) {
  const S v = j.value();
  return j.compose(v * v, S(2) * v, S(2));
}
template <typename S> Jet2<S> pow(const Jet2<S>& j, S p) {
  const S v = j.value();
  return j.compose(std::pow(v, p), p * std::pow(v, p - 1), p * (p - 1) * std::pow(v, p - 2));
}

}  // namespace dmc
