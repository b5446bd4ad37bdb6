#include "dirichlet_mc/coordinate.hpp"

#include <cmath>
#include <stdexcept>

namespace dmc {

std::string to_string(CoordinateKind kind) {
  switch (kind) {
    case CoordinateKind::ou_gaussian: return "ou_gaussian";
    case CoordinateKind::mc_unit: return "mc_unit";
    case CoordinateKind::opaque: return "opaque";
    case CoordinateKind::custom: return "custom";
  }
  return "unknown";
}

CoordinateSpec CoordinateSpec::ou_gaussian(double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw std::invalid_argument("ou_gaussian: variance must be positive and finite");
  CoordinateSpec s;
  s.kind = CoordinateKind::ou_gaussian;
  s.variance = variance;
  s.label = "ou_gaussian";
  const double sd = std::sqrt(variance);
  s.sampler = [sd](CounterStream& rng) { return sd * rng.normal(); };
  s.gamma = [variance](double) { return variance; };
  s.gamma_prime = [](double) { return 0.0; };
  s.gen_a = [](double u) { return -0.5 * u; };
  return s;
}

CoordinateSpec CoordinateSpec::mc_unit() {
  CoordinateSpec s;
  s.kind = CoordinateKind::mc_unit;
  s.label = "mc_unit";
  s.sampler = [](CounterStream& rng) { return rng.uniform(); };
  s.gamma = [](double u) { return u * u * (1.0 - u) * (1.0 - u); };
  s.gamma_prime = [](double u) { return 2.0 * u * (1.0 - u) * (1.0 - 2.0 * u); };
  s.gen_a = [](double u) { return u * (1.0 - u) * (1.0 - 2.0 * u); };
  return s;
}

CoordinateSpec CoordinateSpec::opaque(Sampler sampler, std::string label) {
  CoordinateSpec s;
  s.kind = CoordinateKind::opaque;
  s.label = std::move(label);
  s.sampler = std::move(sampler);
  s.gamma = [](double) { return 0.0; };
  s.gamma_prime = [](double) { return 0.0; };
  s.gen_a = [](double) { return 0.0; };
  return s;
}

CoordinateSpec CoordinateSpec::custom(Sampler sampler, Field gamma, Field gamma_prime, Field gen_a,
                                      std::string label) {
  if (!sampler || !gamma || !gamma_prime || !gen_a)
    throw std::invalid_argument("custom coordinate: all evaluators must be set");
  CoordinateSpec s;
  s.kind = CoordinateKind::custom;
  s.label = std::move(label);
  s.sampler = std::move(sampler);
  s.gamma = std::move(gamma);
  s.gamma_prime = std::move(gamma_prime);
  s.gen_a = std::move(gen_a);
  return s;
}

SpecList make_specs(std::vector<CoordinateSpec> specs) {
  return std::make_shared<const std::vector<CoordinateSpec>>(std::move(specs));
}

BasePoint::BasePoint(SpecList specs, Eigen::VectorXd coords)
    : specs_(std::move(specs)), coords_(std::move(coords)) {
  if (!specs_) throw std::invalid_argument("BasePoint: null spec list");
  if (static_cast<std::size_t>(coords_.size()) != specs_->size())
    throw std::invalid_argument("BasePoint: " + std::to_string(coords_.size()) + " coordinates for " +
                                std::to_string(specs_->size()) + " specs");
  slot_.assign(specs_->size(), -1);
  for (std::size_t i = 0; i < specs_->size(); ++i) {
    if ((*specs_)[i].active()) {
      slot_[i] = static_cast<Eigen::Index>(active_index_.size());
      active_index_.push_back(static_cast<Eigen::Index>(i));
    }
  }
  if (active_index_.size() > kMaxActiveCoordinates)
    throw std::invalid_argument("BasePoint: " + std::to_string(active_index_.size()) +
                                " active coordinates exceed the cap of " +
                                std::to_string(kMaxActiveCoordinates));
  const auto m = active_count();
  gamma_.resize(m);
  gamma_prime_.resize(m);
  gen_a_.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto i = active_index_[static_cast<std::size_t>(k)];
    const auto& s = spec(i);
    const double u = coords_(i);
    if (s.kind == CoordinateKind::mc_unit && !(u >= 0.0 && u <= 1.0))
      throw std::domain_error("BasePoint: mc_unit coordinate " + std::to_string(i) + " outside [0,1]");
    gamma_(k) = s.gamma(u);
    gamma_prime_(k) = s.gamma_prime(u);
    gen_a_(k) = s.gen_a(u);
    if (gamma_(k) < 0.0)
      throw std::domain_error("BasePoint: negative weight gamma at coordinate " + std::to_string(i));
  }
}

BasePoint sample_base(const SpecList& specs, CounterStream& stream) {
  Eigen::VectorXd u(static_cast<Eigen::Index>(specs->size()));
  for (std::size_t i = 0; i < specs->size(); ++i) u(static_cast<Eigen::Index>(i)) = (*specs)[i].sampler(stream);
  return BasePoint(specs, std::move(u));
}

}  // namespace dmc
