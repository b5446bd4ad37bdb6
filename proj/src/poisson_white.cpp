#include "dirichlet_mc/poisson_white.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dirichlet_mc/parallel.hpp"
#include "dirichlet_mc/stats.hpp"

namespace dmc {

namespace {

void check_fd(const std::string& what, const std::function<double(double)>& f,
              const std::function<double(double)>& df, double x) {
  const double step = 1e-5;
  const double fd = (f(x + step) - f(x - step)) / (2.0 * step);
  const double exact = df(x);
  if (!std::isfinite(exact) || std::abs(fd - exact) > 1e-5 * std::max(1.0, std::abs(exact)))
    throw std::invalid_argument("PoissonFunctionalSpec: " + what + " disagrees with finite differences at " +
                                std::to_string(x));
}

double relative_gap(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

}  // namespace

void PoissonFunctionalSpec::validate() const {
  if (!(total_mass > 0.0) || !std::isfinite(total_mass))
    throw std::invalid_argument("PoissonFunctionalSpec: total mass must be positive and finite");
  if (!(support_hi > support_lo)) throw std::invalid_argument("PoissonFunctionalSpec: empty support");
  if (!point_sampler || !h || !h1 || !h2 || !base_gamma || !base_gamma_prime || !base_a)
    throw std::invalid_argument("PoissonFunctionalSpec: missing evaluator");
  for (int p = 0; p < 10; ++p) {
    const double x = support_lo + (support_hi - support_lo) * (p + 0.5) / 10.0;
    check_fd("h'", h, h1, x);
    check_fd("h''", h1, h2, x);
    check_fd("gamma'", base_gamma, base_gamma_prime, x);
  }
}

CoordinateSpec PoissonFunctionalSpec::point_coordinate() const {
  return CoordinateSpec::custom(point_sampler, base_gamma, base_gamma_prime, base_a, name + "_point");
}

PointFunction parse_point_function(const std::string& name) {
  if (name == "identity") return PointFunction::identity;
  if (name == "sin" || name == "sine") return PointFunction::sine;
  if (name == "polynomial" || name == "cubic") return PointFunction::cubic;
  throw std::invalid_argument("unknown point function '" + name + "' (valid: identity, sin, polynomial)");
}

std::string to_string(PointFunction f) {
  switch (f) {
    case PointFunction::identity: return "identity";
    case PointFunction::sine: return "sin";
    case PointFunction::cubic: return "polynomial";
  }
  return "unknown";
}

PoissonFunctionalSpec poisson_mc_unit(double lambda, PointFunction h) {
  const CoordinateSpec mc = CoordinateSpec::mc_unit();
  PoissonFunctionalSpec s;
  s.name = "poisson_mc_unit";
  s.total_mass = lambda;
  s.point_sampler = mc.sampler;
  s.base_gamma = mc.gamma;
  s.base_gamma_prime = mc.gamma_prime;
  s.base_a = mc.gen_a;
  constexpr double w = 2.0 * std::numbers::pi;
  switch (h) {
    case PointFunction::identity:
      s.h = [](double p) { return p; };
      s.h1 = [](double) { return 1.0; };
      s.h2 = [](double) { return 0.0; };
      break;
    case PointFunction::sine:
      s.h = [](double p) { return std::sin(w * p); };
      s.h1 = [](double p) { return w * std::cos(w * p); };
      s.h2 = [](double p) { return -w * w * std::sin(w * p); };
      break;
    case PointFunction::cubic:
      s.h = [](double p) { return p * p * p; };
      s.h1 = [](double p) { return 3.0 * p * p; };
      s.h2 = [](double p) { return 6.0 * p; };
      break;
  }
  s.validate();
  return s;
}

PoissonFunctionalSpec scaled(const PoissonFunctionalSpec& spec, double c) {
  PoissonFunctionalSpec s = spec;
  s.h = [f = spec.h, c](double p) { return c * f(p); };
  s.h1 = [f = spec.h1, c](double p) { return c * f(p); };
  s.h2 = [f = spec.h2, c](double p) { return c * f(p); };
  return s;
}

std::vector<double> sample_configuration(const PoissonFunctionalSpec& spec, CounterStream& stream) {
  const auto k = stream.poisson(spec.total_mass);
  std::vector<double> points(k);
  for (auto& p : points) p = spec.point_sampler(stream);
  return points;
}

ErrorQuad poisson_quad(const PoissonFunctionalSpec& spec, const std::vector<double>& points) {
  double x = 0.0, gamma = 0.0, a = 0.0, gxg = 0.0;
  for (double p : points) {
    const double g = spec.base_gamma(p), gp = spec.base_gamma_prime(p);
    const double d1 = spec.h1(p), d2 = spec.h2(p);
    x += spec.h(p);
    gamma += g * d1 * d1;
    a += 0.5 * g * d2 + spec.base_a(p) * d1;
    // (gamma[h])' = gamma' h'^2 + 2 gamma h' h''
    gxg += g * d1 * (gp * d1 * d1 + 2.0 * g * d1 * d2);
  }
  ErrorQuad q;
  q.triple = ErrorTriple::scalar(x, gamma, a);
  q.gamma_x_gammax = gxg;
  q.triple.valid = q.triple.valid && std::isfinite(gxg);
  return q;
}

ErrorQuad sample_poisson_quad(const PoissonFunctionalSpec& spec, CounterStream& stream) {
  return poisson_quad(spec, sample_configuration(spec, stream));
}

PoissonCheckReport poisson_identity_check(const PoissonFunctionalSpec& spec, std::size_t n, std::uint64_t seed,
                                          unsigned workers) {
  if (n == 0) throw std::invalid_argument("poisson_identity_check: need N >= 1");
  spec.validate();
  const CoordinateSpec point = spec.point_coordinate();
  const SmoothFn h{spec.h, spec.h1, spec.h2};

  std::vector<double> violation(n, 0.0), counts(n), center_id(n), center_cos(n);
  std::vector<char> jet_done(n, 0);
  parallel_for(chunk_count(n), workers, [&](std::size_t c) {
    CounterStream stream(seed, c);
    const std::size_t end = std::min(n, (c + 1) * kChunkSize);
    for (std::size_t i = c * kChunkSize; i < end; ++i) {
      const auto pts = sample_configuration(spec, stream);
      const ErrorQuad q = poisson_quad(spec, pts);
      counts[i] = static_cast<double>(pts.size());
      center_id[i] = q.a();
      center_cos[i] = -std::sin(q.x()) * q.a() - 0.5 * std::cos(q.x()) * q.gamma();
      if (!pts.empty() && pts.size() <= kMaxActiveCoordinates) {
        Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(pts.data(), static_cast<Eigen::Index>(pts.size()));
        BasePoint base(make_specs(std::vector<CoordinateSpec>(pts.size(), point)), std::move(u));
        Jet2d x = constant_jet(base, 0.0);
        for (Eigen::Index k = 0; k < base.size(); ++k) x += apply(lift(base, k), h);
        const ErrorQuad ref = quad_of(x, base);
        violation[i] = std::max({relative_gap(q.x(), ref.x()), relative_gap(q.gamma(), ref.gamma()),
                                 relative_gap(q.a(), ref.a()), relative_gap(q.gamma_x_gammax, ref.gamma_x_gammax)});
        jet_done[i] = 1;
      }
    }
  });

  PoissonCheckReport r;
  r.samples = n;
  r.jet_checked = static_cast<std::size_t>(std::count(jet_done.begin(), jet_done.end(), 1));
  r.max_violation = *std::max_element(violation.begin(), violation.end());
  r.test_functions = {"x", "cos"};
  r.centering_z = {mean_estimate(center_id).z(), mean_estimate(center_cos).z()};
  const MeanEstimate k = mean_estimate(counts);
  r.count_mean = k.mean;
  r.count_variance = k.variance;
  return r;
}

}  // namespace dmc
