#include "dirichlet_mc/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "dirichlet_mc/parallel.hpp"
#include "dirichlet_mc/wiener_euler.hpp"

namespace dmc {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double lognormal_pdf(double x, double mu, double s) {
  if (!(x > 0.0)) return 0.0;
  const double z = (std::log(x) - mu) / s;
  return kInvSqrt2Pi * std::exp(-0.5 * z * z) / (x * s);
}

double triangular_pdf(double x) {
  if (x <= 0.0 || x >= 2.0) return 0.0;
  return x <= 1.0 ? x : 2.0 - x;
}

// GBM parameters of the gbm_* scenarios.
constexpr double kGbmVol = 0.3;
constexpr double kGbmRate = 0.05;
constexpr double kGbmX0 = 1.0;
constexpr double kGbmHorizon = 1.0;

/// Wires draw_quad / draw_triple from the jet functional.
void attach_functional(Scenario& s) {
  auto specs = make_specs(s.specs);
  auto fn = s.functional;
  s.draw_quad = [specs, fn](CounterStream& rng) { return fn(sample_base(specs, rng)); };
  s.draw_triple = [specs, fn](CounterStream& rng) { return fn(sample_base(specs, rng)).triple; };
}

ErrorQuad with_aux(const Jet2d& x, const BasePoint& base, const Jet2d& g, bool unit_aux) {
  return unit_aux ? quad_of(x, base, constant_jet(base, 1.0)) : quad_of(x, base, g);
}

Scenario gaussian(const ScenarioParams& p) {
  Scenario s;
  s.name = "gaussian";
  s.description = "X = G, G standard normal (Ornstein-Uhlenbeck coordinate); G tracked as X";
  s.specs = {CoordinateSpec::ou_gaussian(1.0)};
  s.functional = [unit = p.unit_aux](const BasePoint& b) {
    const Jet2d x = lift(b, 0);
    return with_aux(x, b, x, unit);
  };
  s.exact_density = normal_pdf;
  s.gamma_given_x = [](double) { return 1.0; };
  s.conditional_reference = [unit = p.unit_aux](double x) { return unit ? 1.0 : x; };
  s.check_points = {-1.0, 0.0, 1.0};
  attach_functional(s);
  return s;
}

Scenario lognormal(const ScenarioParams& p) {
  Scenario s;
  s.name = "lognormal";
  s.description = "X = exp(G), G standard normal; G tracked as X";
  s.specs = {CoordinateSpec::ou_gaussian(1.0)};
  s.functional = [unit = p.unit_aux](const BasePoint& b) {
    const Jet2d x = exp(lift(b, 0));
    return with_aux(x, b, x, unit);
  };
  s.exact_density = [](double x) { return lognormal_pdf(x, 0.0, 1.0); };
  s.gamma_given_x = [](double x) { return x * x; };
  s.conditional_reference = [unit = p.unit_aux](double x) { return unit ? 1.0 : x; };
  s.check_points = {0.5, 1.0, 2.0};
  s.support_lo = 0.0;
  s.support_hi = 400.0;
  attach_functional(s);
  return s;
}

Scenario gaussian_pair(const ScenarioParams& p) {
  Scenario s;
  s.name = "gaussian_pair";
  s.description = "X = G1 + sin(G2), G1, G2 independent standard normals; tracks G = sin(G2)";
  s.specs = {CoordinateSpec::ou_gaussian(1.0), CoordinateSpec::ou_gaussian(1.0)};
  s.functional = [unit = p.unit_aux](const BasePoint& b) {
    const Jet2d g = sin(lift(b, 1));
    return with_aux(lift(b, 0) + g, b, g, unit);
  };
  auto rule = std::make_shared<const Rule1d>(gauss_hermite(64));
  s.exact_density = [rule](double x) {
    double f = 0.0;
    for (Eigen::Index k = 0; k < rule->nodes.size(); ++k) f += rule->weights(k) * normal_pdf(x - std::sin(rule->nodes(k)));
    return f;
  };
  s.conditional_reference = [rule, unit = p.unit_aux](double x) {
    if (unit) return 1.0;
    double num = 0.0, den = 0.0;
    for (Eigen::Index k = 0; k < rule->nodes.size(); ++k) {
      const double sg = std::sin(rule->nodes(k));
      const double w = rule->weights(k) * normal_pdf(x - sg);
      num += w * sg;
      den += w;
    }
    return num / den;
  };
  s.check_points = {-1.0, 0.0, 1.0};
  attach_functional(s);
  return s;
}

Scenario triangular(const ScenarioParams& p) {
  Scenario s;
  s.name = "triangular";
  s.description = "X = U0 + U1 on the Monte Carlo space (mc_unit^2); triangular density; tracks G = U0";
  s.specs = {CoordinateSpec::mc_unit(), CoordinateSpec::mc_unit()};
  s.functional = [unit = p.unit_aux](const BasePoint& b) {
    const Jet2d u0 = lift(b, 0);
    return with_aux(u0 + lift(b, 1), b, u0, unit);
  };
  s.exact_density = triangular_pdf;
  s.conditional_reference = [unit = p.unit_aux](double x) { return unit ? 1.0 : 0.5 * x; };
  // E[1/Gamma] diverges at the corners of the square.
  s.direct_admissible = false;
  s.regularization = 1e-4;
  s.check_points = {0.25, 0.5, 1.5};
  s.support_lo = 0.0;
  s.support_hi = 2.0;
  attach_functional(s);
  return s;
}

Scenario gbm_exact(const ScenarioParams& p) {
  Scenario s;
  s.name = "gbm_exact";
  s.description = "exact GBM X_T = x0 exp((r - vol^2/2) T + vol B_T), vol = 0.3, r = 0.05, x0 = 1, T = 1";
  s.specs = {CoordinateSpec::ou_gaussian(kGbmHorizon)};
  s.functional = [unit = p.unit_aux](const BasePoint& b) {
    const Jet2d x =
        exp(lift(b, 0) * kGbmVol + (kGbmRate - 0.5 * kGbmVol * kGbmVol) * kGbmHorizon) * kGbmX0;
    return with_aux(x, b, x, unit);
  };
  const double mu = std::log(kGbmX0) + (kGbmRate - 0.5 * kGbmVol * kGbmVol) * kGbmHorizon;
  const double sd = kGbmVol * std::sqrt(kGbmHorizon);
  s.exact_density = [mu, sd](double x) { return lognormal_pdf(x, mu, sd); };
  s.gamma_given_x = [](double x) { return kGbmVol * kGbmVol * kGbmHorizon * x * x; };
  s.conditional_reference = [unit = p.unit_aux](double x) { return unit ? 1.0 : x; };
  s.check_points = {0.8, 1.0, 1.3};
  s.support_lo = 0.0;
  s.support_hi = 20.0;
  attach_functional(s);
  return s;
}

Scenario euler_scenario(std::string name, std::string description, SdeCoefficients coeffs, double x0,
                        const ScenarioParams& p) {
  if (p.euler_steps == 0 || p.euler_steps > kMaxActiveCoordinates)
    throw std::invalid_argument("euler scenarios: steps must lie in [1, " + std::to_string(kMaxActiveCoordinates) +
                                "]");
  Scenario s;
  s.name = std::move(name);
  s.description = std::move(description);
  auto c = std::make_shared<const SdeCoefficients>(std::move(coeffs));
  const std::size_t n = p.euler_steps;
  const double sd = std::sqrt(kGbmHorizon / static_cast<double>(n));
  auto increments = [n, sd](CounterStream& rng) {
    Eigen::VectorXd db(static_cast<Eigen::Index>(n));
    for (Eigen::Index k = 0; k < db.size(); ++k) db(k) = sd * rng.normal();
    return db;
  };
  s.draw_triple = [=](CounterStream& rng) { return euler_triple(x0, kGbmHorizon, increments(rng), *c); };
  s.draw_quad = [=](CounterStream& rng) { return jet_oracle_quad(x0, kGbmHorizon, n, *c, increments(rng)); };
  s.check_points = {x0};
  return s;
}

Scenario poisson(const ScenarioParams& p) {
  Scenario s;
  s.name = "poisson_mc_unit";
  s.description = "N(h) for a Poisson process with intensity lambda * uniform[0,1], mc_unit base structure "
                  "(atom at 0, so the law has no density)";
  auto spec = std::make_shared<const PoissonFunctionalSpec>(poisson_mc_unit(p.poisson_lambda, p.poisson_h));
  s.draw_quad = [spec](CounterStream& rng) { return sample_poisson_quad(*spec, rng); };
  s.draw_triple = [spec](CounterStream& rng) { return sample_poisson_quad(*spec, rng).triple; };
  s.direct_admissible = false;
  s.regularization = 0.1;
  s.check_points = {1.0, 2.5, 4.0};
  return s;
}

template <class T, class Draw>
std::vector<T> draw_chunks(std::size_t n, std::uint64_t seed, unsigned workers, const Draw& draw) {
  std::vector<T> out(n);
  parallel_for(chunk_count(n), workers, [&](std::size_t c) {
    CounterStream rng(seed, c);
    const std::size_t end = std::min(n, (c + 1) * kChunkSize);
    for (std::size_t i = c * kChunkSize; i < end; ++i) out[i] = draw(rng);
  });
  return out;
}

}  // namespace

std::vector<std::string> scenario_names() {
  return {"gaussian",  "lognormal",      "gaussian_pair",    "triangular",      "gbm_euler",
          "gbm_exact", "additive_euler", "zero_noise_euler", "poisson_mc_unit"};
}

namespace {

Scenario build_scenario(const std::string& name, const ScenarioParams& params) {
  if (name == "gaussian") return gaussian(params);
  if (name == "lognormal") return lognormal(params);
  if (name == "gaussian_pair") return gaussian_pair(params);
  if (name == "triangular") return triangular(params);
  if (name == "gbm_exact") return gbm_exact(params);
  if (name == "gbm_euler")
    return euler_scenario("gbm_euler", "Euler scheme for GBM (vol 0.3, rate 0.05, x0 = 1, T = 1); quads from the jet oracle",
                          SdeCoefficients::gbm(kGbmVol, kGbmRate), kGbmX0, params);
  if (name == "additive_euler")
    return euler_scenario("additive_euler", "Euler scheme for dX = 0.5 dB + (0.2 - X) dt, x0 = 0, T = 1",
                          SdeCoefficients::additive(0.5, 1.0, 0.2), 0.0, params);
  if (name == "zero_noise_euler")
    return euler_scenario("zero_noise_euler", "Euler scheme for dX = 0.1 X dt (no noise: Gamma = 0, degenerate)",
                          SdeCoefficients::zero_noise(0.1), 1.0, params);
  if (name == "poisson_mc_unit") return poisson(params);
  std::string valid;
  for (const auto& n : scenario_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw UnknownName("unknown scenario '" + name + "' (valid: " + valid + ")");
}

}  // namespace

Scenario make_scenario(const std::string& name, const ScenarioParams& params) {
  Scenario s = build_scenario(name, params);
  if (s.exact_density) {
    const double mass = exact_density_mass(s);
    if (std::abs(mass - 1.0) > 1e-4)
      throw std::logic_error("scenario '" + s.name + "': exact density integrates to " + std::to_string(mass));
  }
  return s;
}

QuadBatch sample_quads(const Scenario& s, std::size_t n, std::uint64_t seed, unsigned workers) {
  if (!s.draw_quad) throw std::invalid_argument("scenario '" + s.name + "' cannot produce quads");
  return QuadBatch(draw_chunks<ErrorQuad>(n, seed, workers, s.draw_quad));
}

TripleBatch sample_triples(const Scenario& s, std::size_t n, std::uint64_t seed, unsigned workers) {
  return TripleBatch(draw_chunks<ErrorTriple>(n, seed, workers, s.draw_triple));
}

std::vector<ErrorQuad> quads_on_grid(const Scenario& s, const TensorGrid& grid) {
  if (!s.quadrature_capable())
    throw std::invalid_argument("scenario '" + s.name + "' has no quadrature support");
  auto specs = make_specs(s.specs);
  std::vector<ErrorQuad> out;
  out.reserve(grid.size());
  for (Eigen::Index k = 0; k < grid.points.cols(); ++k)
    out.push_back(s.functional(BasePoint(specs, grid.points.col(k))));
  return out;
}

double exact_density_mass(const Scenario& s) {
  if (!s.exact_density) throw std::invalid_argument("scenario '" + s.name + "' has no exact density");
  const double lo = s.support_lo, hi = s.support_hi;
  const CoordinateSpec unit = CoordinateSpec::mc_unit();
  return quadrature_expectation(
      [&](const Eigen::VectorXd& u) { return (hi - lo) * s.exact_density(lo + (hi - lo) * u(0)); },
      std::span(&unit, 1), QuadratureOptions{16, 2000, 0.0});
}

}  // namespace dmc
