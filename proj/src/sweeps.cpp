#include "dirichlet_mc/sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace dmc {

namespace {

/// Kernel value of one scalar draw, nullopt when the covariance is degenerate.
std::optional<double> kernel_at(const ErrorQuad& q, KernelEstimator e, double eps, double x) {
  Eigen::Matrix<double, 1, 1> y = Eigen::Matrix<double, 1, 1>::Zero(), cov = y;
  switch (e) {
    case KernelEstimator::shifted:
      y(0) = x - q.x() - eps * q.a();
      cov(0) = eps * q.gamma();
      break;
    case KernelEstimator::plain_gamma:
      y(0) = x - q.x();
      cov(0) = eps * q.gamma();
      break;
    case KernelEstimator::plain_identity:
      y(0) = x - q.x();
      cov(0) = eps;
      break;
  }
  return gaussian_kernel(y, cov);
}

struct Moments {
  double m1 = 0.0;
  double m2 = 0.0;
  double variance() const { return m2 - m1 * m1; }
};

class QuadratureModel {
public:
  QuadratureModel(const Scenario& s, const QuadratureOptions& opt) {
    if (!s.quadrature_capable())
      throw std::invalid_argument("scenario '" + s.name + "' has no quadrature support (oracle_dim " +
                                  std::to_string(s.oracle_dim()) + "); use --samples N");
    QuadratureOptions fine = opt;
    fine.panels = std::max<std::size_t>(1, opt.panels) * 2;
    coarse_grid_ = tensor_grid(s.specs, opt);
    fine_grid_ = tensor_grid(s.specs, fine);
    coarse_ = quads_on_grid(s, coarse_grid_);
    fine_ = quads_on_grid(s, fine_grid_);
  }

  /// (fine, coarse) moments of the kernel statistic.
  std::pair<Moments, Moments> moments(KernelEstimator e, double eps, double x, const std::string& scenario) const {
    return {integrate(fine_grid_, fine_, e, eps, x, scenario), integrate(coarse_grid_, coarse_, e, eps, x, scenario)};
  }

private:
  static Moments integrate(const TensorGrid& g, const std::vector<ErrorQuad>& quads, KernelEstimator e, double eps,
                           double x, const std::string& scenario) {
    Moments m;
    for (std::size_t k = 0; k < quads.size(); ++k) {
      const auto v = kernel_at(quads[k], e, eps, x);
      if (!v)
        throw std::invalid_argument("scenario '" + scenario +
                                    "' is degenerate: eps*Gamma[X] vanishes at quadrature nodes, "
                                    "the kernel expectation is undefined");
      const double w = g.weights(static_cast<Eigen::Index>(k));
      m.m1 += w * *v;
      m.m2 += w * *v * *v;
    }
    return m;
  }

  TensorGrid coarse_grid_, fine_grid_;
  std::vector<ErrorQuad> coarse_, fine_;
};

std::vector<double> kernel_values(const QuadBatch& b, KernelEstimator e, double eps, double x,
                                  const std::string& scenario) {
  std::vector<double> v;
  v.reserve(b.size());
  for (const auto& q : b.samples())
    if (auto g = kernel_at(q, e, eps, x)) v.push_back(*g);
  if (v.empty())
    throw std::invalid_argument("scenario '" + scenario + "' is degenerate: no usable samples (eps*Gamma[X] = 0)");
  return v;
}

QuadBatch sweep_batch(const Scenario& s, const SweepConfig& cfg) {
  QuadBatch b = sample_quads(s, *cfg.samples, cfg.seed, cfg.workers);
  if (b.size() == 0) throw std::invalid_argument("scenario '" + s.name + "': no valid samples");
  return b;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

KernelEstimator parse_kernel_estimator(const std::string& name) {
  if (name == "shifted") return KernelEstimator::shifted;
  if (name == "plain_gamma") return KernelEstimator::plain_gamma;
  if (name == "plain_identity") return KernelEstimator::plain_identity;
  throw UnknownName("unknown kernel estimator '" + name + "' (valid: shifted, plain_gamma, plain_identity)");
}

std::string to_string(KernelEstimator e) {
  switch (e) {
    case KernelEstimator::shifted: return "shifted";
    case KernelEstimator::plain_gamma: return "plain_gamma";
    case KernelEstimator::plain_identity: return "plain_identity";
  }
  return "unknown";
}

void SweepConfig::validate() const {
  if (epsilons.empty()) throw std::invalid_argument("sweep: no epsilons given");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) throw std::invalid_argument("sweep: epsilons must be positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
      throw std::invalid_argument("sweep: epsilons must be strictly decreasing");
  }
  if (points.empty()) throw std::invalid_argument("sweep: no query points");
  if (samples && *samples < 1000) throw std::invalid_argument("sweep: Monte Carlo sweeps need N >= 1000");
}

double fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw std::invalid_argument("fit_loglog_slope: need at least two points");
  double sx = 0, sy = 0;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw std::invalid_argument("fit_loglog_slope: coordinates must be positive");
    sx += std::log(x);
    sy += std::log(y);
  }
  const double n = static_cast<double>(points.size());
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0;
  for (const auto& [x, y] : points) {
    const double dx = std::log(x) - mx;
    sxy += dx * (std::log(y) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_loglog_slope: all abscissae coincide");
  return sxy / sxx;
}

SweepResult run_bias_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const Scenario s = make_scenario(cfg.scenario, cfg.params);
  if (!s.exact_density) throw std::invalid_argument("scenario '" + s.name + "' has no exact density for a bias sweep");

  SweepResult out;
  std::optional<QuadratureModel> model;
  std::optional<QuadBatch> batch;
  if (cfg.samples) {
    batch = sweep_batch(s, cfg);
  } else {
    model.emplace(s, cfg.quadrature);
  }

  for (double x : cfg.points) {
    const double f = s.exact_density(x);
    std::vector<SweepRow> rows;
    for (double eps : cfg.epsilons) {
      SweepRow r;
      r.epsilon = eps;
      r.x = x;
      r.reference = f;
      if (model) {
        const auto [fine, coarse] = model->moments(cfg.estimator, eps, x, s.name);
        r.estimate = fine.m1;
        r.std_error = std::abs(fine.m1 - coarse.m1);
      } else {
        const MeanEstimate m = mean_estimate(kernel_values(*batch, cfg.estimator, eps, x, s.name));
        r.n = static_cast<double>(m.n);
        r.estimate = m.mean;
        r.std_error = m.std_error;
      }
      r.abs_error = std::abs(r.estimate - r.reference);
      rows.push_back(r);
    }
    std::vector<std::pair<double, double>> fit;
    const std::size_t first = rows.size() > 4 ? rows.size() - 4 : 0;
    for (std::size_t i = first; i < rows.size(); ++i) {
      const auto& r = rows[i];
      if (model && r.abs_error < 10.0 * r.std_error) {
        out.notices.push_back("x = " + fmt(x) + ": eps = " + fmt(r.epsilon) +
                              " dropped from the fit (bias below 10x quadrature error)");
        continue;
      }
      if (r.abs_error > 0.0) fit.emplace_back(r.epsilon, r.abs_error);
    }
    if (fit.size() >= 2) {
      out.slopes.push_back(fit_loglog_slope(fit));
    } else {
      out.slopes.push_back(std::numeric_limits<double>::quiet_NaN());
      out.notices.push_back("x = " + fmt(x) + ": fewer than two usable epsilons, slope undefined");
    }
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
  }
  return out;
}

double variance_limit(const Scenario& s, double x) {
  if (!s.exact_density || !s.gamma_given_x)
    throw std::invalid_argument("scenario '" + s.name +
                                "': variance limit needs an exact density and Gamma as a function of X");
  return s.exact_density(x) / std::sqrt(4.0 * std::numbers::pi * s.gamma_given_x(x));
}

SweepResult run_variance_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const Scenario s = make_scenario(cfg.scenario, cfg.params);
  if (!s.gamma_given_x)
    throw std::invalid_argument("scenario '" + s.name +
                                "': variance sweeps need a d = 1 scenario with (Gamma, A) deterministic in X");

  SweepResult out;
  std::optional<QuadratureModel> model;
  std::optional<QuadBatch> batch;
  if (cfg.samples) {
    batch = sweep_batch(s, cfg);
  } else {
    model.emplace(s, cfg.quadrature);
  }

  for (double x : cfg.points) {
    const double limit = variance_limit(s, x);
    std::vector<std::pair<double, double>> fit;
    for (double eps : cfg.epsilons) {
      SweepRow r;
      r.epsilon = eps;
      r.x = x;
      r.reference = limit;
      const double scale = std::sqrt(eps);
      double var = 0.0;
      if (model) {
        const auto [fine, coarse] = model->moments(cfg.estimator, eps, x, s.name);
        var = fine.variance();
        r.std_error = scale * std::abs(fine.variance() - coarse.variance());
      } else {
        const auto v = kernel_values(*batch, cfg.estimator, eps, x, s.name);
        const MeanEstimate m = mean_estimate(v);
        std::vector<double> dev(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) dev[i] = (v[i] - m.mean) * (v[i] - m.mean);
        var = m.variance;
        r.n = static_cast<double>(m.n);
        r.std_error = scale * mean_estimate(dev).std_error;
      }
      r.estimate = scale * var;
      r.abs_error = std::abs(r.estimate - r.reference);
      if (var > 0.0) fit.emplace_back(eps, var);
      out.rows.push_back(r);
    }
    out.slopes.push_back(fit.size() >= 2 ? fit_loglog_slope(fit) : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

bool IdentityReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.passed; });
}

IdentityReport run_identity_suite(const QuadBatch& batch, const Scenario& s) {
  IdentityReport r;
  r.scenario = s.name;
  auto add = [&](std::string name, std::string param, MeanEstimate m) {
    const bool ok = std::abs(m.z()) <= kIdentityZThreshold;
    r.checks.push_back({std::move(name), std::move(param), m, ok});
  };
  const std::vector<std::pair<std::string, SmoothFn>> centering{
      {"x", identity_fn()}, {"x^2", square_fn()}, {"cos", cosine_fn()}};
  for (const auto& [label, phi] : centering) add("generator_centering", "phi=" + label, generator_centering(batch, phi));
  const std::vector<std::pair<std::string, SmoothFn>> ibp{{"cos", cosine_fn()}, {"x^2", square_fn()}};
  for (double eps : {0.5, 0.1})
    for (const auto& [label, phi] : ibp)
      add("ibp_residual", "phi=" + label + ";eps=" + fmt(eps), ibp_residual(batch, phi, eps));
  if (s.direct_admissible) {
    add("weight_centering", "direct", weight_centering(batch));
  } else {
    add("weight_centering", "eps=" + fmt(s.regularization), weight_centering(batch, s.regularization));
  }
  return r;
}

IdentityReport run_identity_suite(const Scenario& s, std::size_t n, std::uint64_t seed, unsigned workers,
                                  double a_offset) {
  if (n < 2) throw std::invalid_argument("identity suite: need N >= 2");
  QuadBatch batch = sample_quads(s, n, seed, workers);
  if (a_offset != 0.0) {
    std::vector<ErrorQuad> shifted = batch.samples();
    for (auto& q : shifted) q.triple.a(0) += a_offset;
    batch = QuadBatch(std::move(shifted));
  }
  return run_identity_suite(batch, s);
}

std::vector<RateRow> run_rate_table(const Scenario& s, double x, const std::vector<double>& sample_sizes,
                                    const QuadratureOptions& quad) {
  if (!s.exact_density) throw std::invalid_argument("rate table: scenario has no exact density");
  const QuadratureModel model(s, quad);
  const double f = s.exact_density(x);
  std::vector<double> grid;
  for (int k = 0; k <= 36; ++k) grid.push_back(std::pow(10.0, -0.1 * k));
  std::vector<RateRow> rows;
  for (KernelEstimator e : {KernelEstimator::shifted, KernelEstimator::plain_gamma}) {
    std::vector<std::pair<double, Moments>> curve;
    for (double eps : grid) curve.emplace_back(eps, model.moments(e, eps, x, s.name).first);
    for (double n : sample_sizes) {
      RateRow best{e, n, 0.0, 0.0, 0.0, std::numeric_limits<double>::infinity()};
      for (const auto& [eps, m] : curve) {
        const double bias = m.m1 - f;
        const double mse = bias * bias + m.variance() / n;
        if (mse < best.mse) best = {e, n, eps, bias, m.variance(), mse};
      }
      rows.push_back(best);
    }
  }
  return rows;
}

}  // namespace dmc
