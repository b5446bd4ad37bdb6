#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include <Eigen/Dense>

#include "dirichlet_mc/calculus.hpp"
#include "dirichlet_mc/rng.hpp"

namespace dmc {

/// Coefficients of dX = sigma(X,t) dB + r(X,t) dt with their first two
/// x-derivatives.
struct SdeCoefficients {
  using Fn = std::function<double(double x, double t)>;

  std::string name;
  Fn sigma, sigma_x, sigma_xx;
  Fn r, r_x, r_xx;

  /// Validates the derivative evaluators against central differences at 10
  /// probe points spread over [probe_lo, probe_hi] x [0, probe_t]
  /// (relative tolerance 1e-5). Throws std::invalid_argument on mismatch.
  static SdeCoefficients checked(std::string name, Fn sigma, Fn sigma_x, Fn sigma_xx, Fn r, Fn r_x, Fn r_xx,
                                 double probe_lo = -2.0, double probe_hi = 2.0, double probe_t = 1.0);

  /// sigma(x) = vol x, r(x) = rate x.
  static SdeCoefficients gbm(double vol, double rate);
  /// sigma = vol, r(x) = reversion (mean - x).
  static SdeCoefficients additive(double vol, double reversion, double mean);
  /// sigma = 0, r(x) = rate x.
  static SdeCoefficients zero_noise(double rate);
};

struct EulerState {
  double x = 0.0;
  double gamma = 0.0;
  double a = 0.0;
  double t = 0.0;
  std::size_t step = 0;
  bool valid = true;
};

/// How the Gamma row is advanced.
///  - euler: Euler discretisation of the extended 3x3 system
///    Gamma+ = Gamma + 2 sigma_x Gamma dB + [sigma^2 + (2 r_x + sigma_x^2) Gamma] h.
///  - chain_rule: the square field of the discrete X-step itself,
///    Gamma+ = (1 + sigma_x dB + r_x h)^2 Gamma + sigma^2 h.
/// The X and A rows are the same in both.
enum class GammaUpdate { euler, chain_rule };

EulerState euler_triple_step(const EulerState& s, double db, double h, const SdeCoefficients& c,
                             GammaUpdate update = GammaUpdate::euler);

struct SimulatedPath {
  ErrorTriple triple;
  Eigen::VectorXd increments;
};

/// n steps of mesh T/n from (x0, 0, 0) with dB_k ~ N(0, h) drawn from `stream`.
SimulatedPath simulate_triple(double x0, double horizon, std::size_t steps, const SdeCoefficients& c,
                              CounterStream& stream, GammaUpdate update = GammaUpdate::euler);

/// Replays the extended scheme on given increments.
ErrorTriple euler_triple(double x0, double horizon, const Eigen::VectorXd& increments, const SdeCoefficients& c,
                         GammaUpdate update = GammaUpdate::euler);

/// X_T^n built as a jet over the n increments (each an ou_gaussian(h)
/// coordinate), followed by gamma_of / a_of. Rejects n above the jet cap.
ErrorTriple jet_oracle_triple(double x0, double horizon, std::size_t steps, const SdeCoefficients& c,
                              const Eigen::VectorXd& increments);

/// Same jet, assembled into an ErrorQuad (adds Gamma[X, Gamma[X]]).
ErrorQuad jet_oracle_quad(double x0, double horizon, std::size_t steps, const SdeCoefficients& c,
                          const Eigen::VectorXd& increments);

/// Exact GBM solution x0 exp((rate - vol^2/2) T + vol B_T) as a jet over B_T
/// (one ou_gaussian(T) coordinate).
ErrorQuad gbm_exact_quad(double x0, double horizon, double vol, double rate, double brownian_T);

}  // namespace dmc
