#include "dirichlet_mc/wiener_euler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dmc {

namespace {

void check_derivative(const std::string& what, const SdeCoefficients::Fn& f, const SdeCoefficients::Fn& df,
                      double x, double t) {
  const double step = 1e-4 * std::max(1.0, std::abs(x));
  const double fd = (f(x + step, t) - f(x - step, t)) / (2.0 * step);
  const double exact = df(x, t);
  if (!std::isfinite(exact) || std::abs(fd - exact) > 1e-5 * std::max(1.0, std::abs(exact)))
    throw std::invalid_argument("SdeCoefficients: " + what + " disagrees with finite differences at x = " +
                                std::to_string(x) + ", t = " + std::to_string(t));
}

SpecList increment_specs(std::size_t steps, double h) {
  return make_specs(std::vector<CoordinateSpec>(steps, CoordinateSpec::ou_gaussian(h)));
}

struct JetPath {
  BasePoint base;
  Jet2d x;
};

JetPath jet_path(double x0, double horizon, std::size_t steps, const SdeCoefficients& c,
                 const Eigen::VectorXd& increments) {
  if (steps == 0 || !(horizon > 0.0)) throw std::invalid_argument("jet oracle: need n >= 1 and T > 0");
  if (static_cast<std::size_t>(increments.size()) != steps)
    throw std::invalid_argument("jet oracle: increments length differs from step count");
  if (steps > kMaxActiveCoordinates)
    throw std::invalid_argument("jet oracle: " + std::to_string(steps) + " steps exceed the jet coordinate cap of " +
                                std::to_string(kMaxActiveCoordinates));
  const double h = horizon / static_cast<double>(steps);
  BasePoint base(increment_specs(steps, h), increments);
  Jet2d x = constant_jet(base, x0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * h;
    const double v = x.value();
    const Jet2d sigma = x.compose(c.sigma(v, t), c.sigma_x(v, t), c.sigma_xx(v, t));
    const Jet2d drift = x.compose(c.r(v, t), c.r_x(v, t), c.r_xx(v, t));
    x += sigma * lift(base, static_cast<Eigen::Index>(k)) + drift * h;
  }
  return {std::move(base), std::move(x)};
}

}  // namespace

SdeCoefficients SdeCoefficients::checked(std::string name, Fn sigma, Fn sigma_x, Fn sigma_xx, Fn r, Fn r_x,
                                         Fn r_xx, double probe_lo, double probe_hi, double probe_t) {
  SdeCoefficients c{std::move(name), std::move(sigma), std::move(sigma_x), std::move(sigma_xx),
                    std::move(r),    std::move(r_x),   std::move(r_xx)};
  for (int p = 0; p < 10; ++p) {
    const double x = probe_lo + (probe_hi - probe_lo) * (p + 0.5) / 10.0;
    const double t = probe_t * p / 9.0;
    check_derivative("sigma_x", c.sigma, c.sigma_x, x, t);
    check_derivative("sigma_xx", c.sigma_x, c.sigma_xx, x, t);
    check_derivative("r_x", c.r, c.r_x, x, t);
    check_derivative("r_xx", c.r_x, c.r_xx, x, t);
    if (!std::isfinite(c.sigma(x, t)) || !std::isfinite(c.r(x, t)))
      throw std::invalid_argument("SdeCoefficients: non-finite coefficient at probe point");
  }
  return c;
}

SdeCoefficients SdeCoefficients::gbm(double vol, double rate) {
  return checked(
      "gbm", [vol](double x, double) { return vol * x; }, [vol](double, double) { return vol; },
      [](double, double) { return 0.0; }, [rate](double x, double) { return rate * x; },
      [rate](double, double) { return rate; }, [](double, double) { return 0.0; });
}

SdeCoefficients SdeCoefficients::additive(double vol, double reversion, double mean) {
  return checked(
      "additive", [vol](double, double) { return vol; }, [](double, double) { return 0.0; },
      [](double, double) { return 0.0; }, [=](double x, double) { return reversion * (mean - x); },
      [reversion](double, double) { return -reversion; }, [](double, double) { return 0.0; });
}

SdeCoefficients SdeCoefficients::zero_noise(double rate) {
  return checked(
      "zero_noise", [](double, double) { return 0.0; }, [](double, double) { return 0.0; },
      [](double, double) { return 0.0; }, [rate](double x, double) { return rate * x; },
      [rate](double, double) { return rate; }, [](double, double) { return 0.0; });
}

EulerState euler_triple_step(const EulerState& s, double db, double h, const SdeCoefficients& c,
                             GammaUpdate update) {
  if (!(h > 0.0)) throw std::invalid_argument("euler_triple_step: step size must be positive");
  const double sig = c.sigma(s.x, s.t), sig_x = c.sigma_x(s.x, s.t), sig_xx = c.sigma_xx(s.x, s.t);
  const double r = c.r(s.x, s.t), r_x = c.r_x(s.x, s.t), r_xx = c.r_xx(s.x, s.t);

  EulerState n;
  n.x = s.x + sig * db + r * h;
  if (update == GammaUpdate::euler) {
    n.gamma = s.gamma + 2.0 * sig_x * s.gamma * db + (sig * sig + (2.0 * r_x + sig_x * sig_x) * s.gamma) * h;
  } else {
    const double growth = 1.0 + sig_x * db + r_x * h;
    n.gamma = growth * growth * s.gamma + sig * sig * h;
  }
  n.a = s.a + (-0.5 * sig + 0.5 * sig_xx * s.gamma + sig_x * s.a) * db + (0.5 * r_xx * s.gamma + r_x * s.a) * h;
  n.t = s.t + h;
  n.step = s.step + 1;
  n.valid = s.valid && std::isfinite(n.x) && std::isfinite(n.gamma) && std::isfinite(n.a) && n.gamma >= 0.0;
  return n;
}

ErrorTriple euler_triple(double x0, double horizon, const Eigen::VectorXd& increments, const SdeCoefficients& c,
                         GammaUpdate update) {
  const auto steps = static_cast<std::size_t>(increments.size());
  if (steps == 0 || !(horizon > 0.0)) throw std::invalid_argument("euler_triple: need n >= 1 and T > 0");
  const double h = horizon / static_cast<double>(steps);
  EulerState s{x0, 0.0, 0.0, 0.0, 0, true};
  for (std::size_t k = 0; k < steps; ++k) {
    s = euler_triple_step(s, increments(static_cast<Eigen::Index>(k)), h, c, update);
    s.t = static_cast<double>(k + 1) * h;
  }
  ErrorTriple out = ErrorTriple::scalar(s.x, s.gamma, s.a);
  out.valid = out.valid && s.valid;
  return out;
}

SimulatedPath simulate_triple(double x0, double horizon, std::size_t steps, const SdeCoefficients& c,
                              CounterStream& stream, GammaUpdate update) {
  if (steps == 0 || !(horizon > 0.0)) throw std::invalid_argument("simulate_triple: need n >= 1 and T > 0");
  const double sd = std::sqrt(horizon / static_cast<double>(steps));
  Eigen::VectorXd db(static_cast<Eigen::Index>(steps));
  for (Eigen::Index k = 0; k < db.size(); ++k) db(k) = sd * stream.normal();
  ErrorTriple t = euler_triple(x0, horizon, db, c, update);
  return {std::move(t), std::move(db)};
}

ErrorTriple jet_oracle_triple(double x0, double horizon, std::size_t steps, const SdeCoefficients& c,
                              const Eigen::VectorXd& increments) {
  const JetPath p = jet_path(x0, horizon, steps, c, increments);
  ErrorTriple t = ErrorTriple::scalar(p.x.value(), gamma_of(p.x, p.x, p.base), a_of(p.x, p.base));
  t.valid = t.valid && p.x.finite();
  return t;
}

ErrorQuad jet_oracle_quad(double x0, double horizon, std::size_t steps, const SdeCoefficients& c,
                          const Eigen::VectorXd& increments) {
  const JetPath p = jet_path(x0, horizon, steps, c, increments);
  return quad_of(p.x, p.base);
}

ErrorQuad gbm_exact_quad(double x0, double horizon, double vol, double rate, double brownian_T) {
  BasePoint base(make_specs({CoordinateSpec::ou_gaussian(horizon)}), Eigen::VectorXd::Constant(1, brownian_T));
  const Jet2d b = lift(base, 0);
  const Jet2d x = exp(b * vol + (rate - 0.5 * vol * vol) * horizon) * x0;
  return quad_of(x, base);
}

}  // namespace dmc
