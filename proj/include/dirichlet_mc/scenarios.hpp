#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dirichlet_mc/calculus.hpp"
#include "dirichlet_mc/estimators.hpp"
#include "dirichlet_mc/poisson_white.hpp"
#include "dirichlet_mc/quadrature.hpp"
#include "dirichlet_mc/rng.hpp"

namespace dmc {

/// Thrown for an unknown scenario or estimator name; what() lists the valid names.
class UnknownName : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Tunables for the built-in scenarios.
struct ScenarioParams {
  double poisson_lambda = 5.0;
  PointFunction poisson_h = PointFunction::identity;
  std::size_t euler_steps = 16;
  bool unit_aux = false;  // track G = 1 instead of the scenario's own G
};

struct Scenario {
  std::string name;
  std::string description;

  /// Base coordinates of the jet functional; empty for scenarios sampled by
  /// a dedicated simulator (Euler paths, Poisson configurations).
  std::vector<CoordinateSpec> specs;
  std::function<ErrorQuad(const BasePoint&)> functional;

  std::function<ErrorQuad(CounterStream&)> draw_quad;
  std::function<ErrorTriple(CounterStream&)> draw_triple;

  std::function<double(double)> exact_density;
  /// Interval holding the mass of exact_density (normalisation check).
  double support_lo = -12.0;
  double support_hi = 12.0;
  /// Gamma[X] when it is a deterministic function of X (variance sweeps).
  std::function<double(double)> gamma_given_x;
  /// E[G | X = x] for the tracked auxiliary scalar, when known.
  std::function<double(double)> conditional_reference;

  bool direct_admissible = true;  // 1/Gamma[X] integrable: unregularised formula applies
  double regularization = 0.1;    // eps for the regularised formula otherwise
  std::vector<double> check_points;

  std::size_t oracle_dim() const { return functional ? specs.size() : 0; }
  bool quadrature_capable() const { return oracle_dim() >= 1 && oracle_dim() <= kMaxQuadratureDim; }
};

std::vector<std::string> scenario_names();

/// Builds a scenario by name; throws UnknownName. Scenarios with an exact
/// density are checked to integrate to one (tolerance 1e-4).
Scenario make_scenario(const std::string& name, const ScenarioParams& params = {});

/// N draws in chunks of kChunkSize, chunk c from CounterStream(seed, c).
QuadBatch sample_quads(const Scenario& s, std::size_t n, std::uint64_t seed, unsigned workers = 1);
TripleBatch sample_triples(const Scenario& s, std::size_t n, std::uint64_t seed, unsigned workers = 1);

/// Quads of the scenario functional at every node of a quadrature grid.
std::vector<ErrorQuad> quads_on_grid(const Scenario& s, const TensorGrid& grid);

/// Integral of the exact density over its support interval.
double exact_density_mass(const Scenario& s);

}  // namespace dmc
