#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dirichlet_mc/rng.hpp"

namespace dmc {

/// Cap on the number of differentiable coordinates a jet may span.
inline constexpr std::size_t kMaxActiveCoordinates = 64;

enum class CoordinateKind { ou_gaussian, mc_unit, opaque, custom };

std::string to_string(CoordinateKind kind);

/// One factor of a product error structure: a law to sample from, the
/// weight gamma(u) = Gamma[u](u), its derivative, and the generator applied
/// to the identity function.
struct CoordinateSpec {
  using Sampler = std::function<double(CounterStream&)>;
  using Field = std::function<double(double)>;

  CoordinateKind kind = CoordinateKind::custom;
  double variance = 0.0;  // ou_gaussian only
  std::string label;
  Sampler sampler;
  Field gamma;
  Field gamma_prime;
  Field gen_a;

  /// Centered Gaussian of the given variance, Ornstein-Uhlenbeck structure:
  /// gamma = variance, a(u) = -u/2.
  static CoordinateSpec ou_gaussian(double variance = 1.0);

  /// Uniform on [0,1] with gamma(u) = u^2 (1-u)^2, a(u) = u (1-u) (1-2u).
  static CoordinateSpec mc_unit();

  /// Sampled but carries no error structure; may not be differentiated.
  static CoordinateSpec opaque(Sampler sampler, std::string label = "opaque");

  static CoordinateSpec custom(Sampler sampler, Field gamma, Field gamma_prime, Field gen_a,
                               std::string label = "custom");

  bool active() const { return kind != CoordinateKind::opaque; }
};

using SpecList = std::shared_ptr<const std::vector<CoordinateSpec>>;

SpecList make_specs(std::vector<CoordinateSpec> specs);

/// A point of the product space together with its coordinate structures.
/// Active (non-opaque) coordinates are assigned consecutive jet slots; the
/// per-slot weights gamma, gamma', a are evaluated once at construction.
class BasePoint {
public:
  BasePoint(SpecList specs, Eigen::VectorXd coords);

  Eigen::Index size() const { return coords_.size(); }
  Eigen::Index active_count() const { return static_cast<Eigen::Index>(active_index_.size()); }

  double coord(Eigen::Index i) const { return coords_(i); }
  const Eigen::VectorXd& coords() const { return coords_; }
  const CoordinateSpec& spec(Eigen::Index i) const { return (*specs_)[static_cast<std::size_t>(i)]; }
  const SpecList& specs() const { return specs_; }

  /// Jet slot of coordinate i, or -1 for opaque coordinates.
  Eigen::Index slot(Eigen::Index i) const { return slot_[static_cast<std::size_t>(i)]; }

  /// Per-slot gamma_i(u_i), gamma'_i(u_i), a_i(u_i).
  const Eigen::VectorXd& weights() const { return gamma_; }
  const Eigen::VectorXd& weight_slopes() const { return gamma_prime_; }
  const Eigen::VectorXd& drifts() const { return gen_a_; }

private:
  SpecList specs_;
  Eigen::VectorXd coords_;
  std::vector<Eigen::Index> slot_;
  std::vector<Eigen::Index> active_index_;
  Eigen::VectorXd gamma_;
  Eigen::VectorXd gamma_prime_;
  Eigen::VectorXd gen_a_;
};

/// Independent draws of every coordinate from its law, in coordinate order.
BasePoint sample_base(const SpecList& specs, CounterStream& stream);

}  // namespace dmc
