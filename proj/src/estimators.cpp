#include "dirichlet_mc/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dmc {

namespace {

DensityEstimate summarize(const Eigen::VectorXd& x, const std::vector<double>& values, std::size_t skipped,
                          std::optional<double> eps) {
  if (values.empty()) throw std::runtime_error("no usable samples");
  const MeanEstimate m = mean_estimate(values);
  DensityEstimate d;
  d.x = x;
  d.value = m.mean;
  d.std_error = m.std_error;
  d.n_used = values.size();
  d.skipped = skipped;
  d.epsilon = eps;
  return d;
}

DensityEstimate summarize(double x, const std::vector<double>& values, std::size_t skipped,
                          std::optional<double> eps) {
  return summarize(Eigen::VectorXd::Constant(1, x), values, skipped, eps);
}

void require_nonempty(std::size_t n) {
  if (n == 0) throw std::invalid_argument("estimator: empty batch");
}

void require_positive(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("estimator: epsilon must be positive");
}

template <class ShiftFn, class CovFn>
std::vector<DensityEstimate> kernel_density(const TripleBatch& b, double eps, const QueryPoints& xs,
                                            DegeneratePolicy policy, ShiftFn shift, CovFn cov) {
  require_nonempty(b.size());
  require_positive(eps);
  const auto d = b.dim();
  std::vector<DensityEstimate> out;
  out.reserve(xs.size());
  for (const auto& x : xs) {
    if (x.size() != d) throw std::invalid_argument("estimator: query point dimension differs from batch");
    std::vector<double> values;
    values.reserve(b.size());
    std::size_t skipped = 0;
    for (const auto& s : b.samples()) {
      std::optional<double> g;
      if (d == 1) {
        const Eigen::Matrix<double, 1, 1> y(x(0) - s.x(0) - shift(s)(0));
        const Eigen::Matrix<double, 1, 1> c(cov(s)(0, 0));
        g = gaussian_kernel(y, c, policy);
      } else {
        const Eigen::VectorXd y = x - s.x - shift(s);
        g = gaussian_kernel(y, cov(s), policy);
      }
      if (g) {
        values.push_back(*g);
      } else {
        ++skipped;
      }
    }
    out.push_back(summarize(x, values, skipped, eps));
  }
  return out;
}

}  // namespace

TripleBatch::TripleBatch(std::vector<ErrorTriple> draws) {
  samples_.reserve(draws.size());
  for (auto& t : draws) {
    if (!samples_.empty() && t.dim() != samples_.front().dim())
      throw std::invalid_argument("TripleBatch: samples of different dimension");
    if (t.valid && t.consistent()) {
      samples_.push_back(std::move(t));
    } else {
      ++invalid_;
    }
  }
}

QuadBatch::QuadBatch(std::vector<ErrorQuad> draws) {
  samples_.reserve(draws.size());
  for (auto& q : draws) {
    if (q.triple.dim() != 1) throw std::invalid_argument("QuadBatch: samples must be scalar");
    if (q.valid() && std::isfinite(q.gamma_x_gammax) && q.gamma() >= 0.0) {
      samples_.push_back(std::move(q));
    } else {
      ++invalid_;
    }
  }
}

bool QuadBatch::has_aux() const {
  return !samples_.empty() &&
         std::all_of(samples_.begin(), samples_.end(), [](const ErrorQuad& q) { return q.aux.has_value(); });
}

TripleBatch QuadBatch::triples() const {
  std::vector<ErrorTriple> t;
  t.reserve(samples_.size());
  for (const auto& q : samples_) t.push_back(q.triple);
  return TripleBatch(std::move(t));
}

QueryPoints scalar_points(std::span<const double> xs) {
  QueryPoints out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(Eigen::VectorXd::Constant(1, x));
  return out;
}

std::vector<DensityEstimate> shifted_kernel_density(const TripleBatch& b, double eps, const QueryPoints& xs,
                                                    DegeneratePolicy policy) {
  return kernel_density(
      b, eps, xs, policy, [eps](const ErrorTriple& s) -> Eigen::VectorXd { return eps * s.a; },
      [eps](const ErrorTriple& s) -> Eigen::MatrixXd { return eps * s.gamma; });
}

std::vector<DensityEstimate> plain_kernel_density(const TripleBatch& b, double eps, const QueryPoints& xs,
                                                  PlainKernel variant, DegeneratePolicy policy) {
  const auto zero_shift = [](const ErrorTriple& s) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(s.dim()); };
  if (variant == PlainKernel::identity_cov) {
    return kernel_density(b, eps, xs, policy, zero_shift, [eps](const ErrorTriple& s) -> Eigen::MatrixXd {
      return eps * Eigen::MatrixXd::Identity(s.dim(), s.dim());
    });
  }
  return kernel_density(b, eps, xs, policy, zero_shift,
                        [eps](const ErrorTriple& s) -> Eigen::MatrixXd { return eps * s.gamma; });
}

std::optional<double> direct_weight(const ErrorQuad& q) {
  const double g = q.gamma();
  if (!(g > 0.0)) return std::nullopt;
  return -(q.gamma_x_gammax / (g * g)) + 2.0 * q.a() / g;
}

double regularized_weight(const ErrorQuad& q, double eps) {
  const double g = eps + q.gamma();
  return -(q.gamma_x_gammax / (g * g)) + 2.0 * q.a() / g;
}

std::vector<DensityEstimate> direct_density(const QuadBatch& b, std::span<const double> xs) {
  require_nonempty(b.size());
  std::vector<double> w;
  std::vector<double> pos;
  w.reserve(b.size());
  pos.reserve(b.size());
  for (const auto& q : b.samples()) {
    if (auto wq = direct_weight(q)) {
      w.push_back(*wq);
      pos.push_back(q.x());
    }
  }
  const std::size_t skipped = b.size() - w.size();
  std::vector<DensityEstimate> out;
  for (double x : xs) {
    std::vector<double> v(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) v[i] = 0.5 * sign_of(x - pos[i]) * w[i];
    out.push_back(summarize(x, v, skipped, std::nullopt));
  }
  return out;
}

std::vector<DensityEstimate> regularized_density(const QuadBatch& b, double eps, std::span<const double> xs) {
  require_nonempty(b.size());
  require_positive(eps);
  std::vector<double> w(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) w[i] = regularized_weight(b.samples()[i], eps);
  std::vector<DensityEstimate> out;
  for (double x : xs) {
    std::vector<double> v(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) v[i] = 0.5 * sign_of(x - b.samples()[i].x()) * w[i];
    out.push_back(summarize(x, v, 0, eps));
  }
  return out;
}

std::vector<ConditionalEstimate> conditional_expectation(const QuadBatch& b, std::span<const double> xs) {
  require_nonempty(b.size());
  if (!b.has_aux()) throw std::invalid_argument("conditional_expectation: batch carries no auxiliary G data");
  std::vector<double> wg, w, pos;
  for (const auto& q : b.samples()) {
    const double g = q.gamma();
    if (!(g > 0.0)) continue;
    const double gv = q.aux->value;
    wg.push_back(q.aux->gamma_x_g / g - gv * q.gamma_x_gammax / (g * g) + 2.0 * gv * q.a() / g);
    w.push_back(*direct_weight(q));
    pos.push_back(q.x());
  }
  const std::size_t skipped = b.size() - w.size();
  std::vector<ConditionalEstimate> out;
  for (double x : xs) {
    std::vector<double> num(w.size()), den(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double s = sign_of(x - pos[i]);
      num[i] = 0.5 * s * wg[i];
      den[i] = 0.5 * s * w[i];
    }
    ConditionalEstimate c;
    c.x = x;
    c.numerator = summarize(x, num, skipped, std::nullopt);
    c.density = summarize(x, den, skipped, std::nullopt);
    c.ratio = c.numerator.value / c.density.value;
    std::vector<double> lin(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) lin[i] = num[i] - c.ratio * den[i];
    c.ratio_std_error = mean_estimate(lin).std_error / std::abs(c.density.value);
    c.reliable = std::abs(c.density.value) > 2.0 * c.density.std_error;
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

struct WeightedSample {
  double x;
  double w;
};

std::vector<WeightedSample> direct_samples(const QuadBatch& b) {
  std::vector<WeightedSample> s;
  s.reserve(b.size());
  for (const auto& q : b.samples())
    if (auto w = direct_weight(q)) s.push_back({q.x(), *w});
  return s;
}

double fit_coefficient(std::span<const WeightedSample> half, double x) {
  std::vector<double> num(half.size()), den(half.size());
  for (std::size_t i = 0; i < half.size(); ++i) {
    den[i] = half[i].w * half[i].w;
    num[i] = sign_of(x - half[i].x) * den[i];
  }
  const double d = pairwise_sum(den);
  return d > 0.0 ? pairwise_sum(num) / d : 0.0;
}

}  // namespace

std::vector<double> centered_coefficients(const QuadBatch& b, std::span<const double> xs) {
  const auto s = direct_samples(b);
  if (s.size() < 2) throw std::invalid_argument("centered_direct_density: need at least two usable samples");
  const std::span<const WeightedSample> first(s.data(), s.size() / 2);
  std::vector<double> c;
  for (double x : xs) c.push_back(fit_coefficient(first, x));
  return c;
}

std::vector<DensityEstimate> centered_direct_density(const QuadBatch& b, std::span<const double> xs,
                                                     std::optional<double> forced_c) {
  require_nonempty(b.size());
  const auto s = direct_samples(b);
  if (s.size() < 2) throw std::invalid_argument("centered_direct_density: need at least two usable samples");
  const std::size_t half = s.size() / 2;
  const std::span<const WeightedSample> first(s.data(), half);
  const std::span<const WeightedSample> second(s.data() + half, s.size() - half);
  const std::size_t skipped = b.size() - s.size();
  std::vector<DensityEstimate> out;
  for (double x : xs) {
    const double c = forced_c ? *forced_c : fit_coefficient(first, x);
    std::vector<double> v(second.size());
    for (std::size_t i = 0; i < second.size(); ++i) v[i] = 0.5 * (sign_of(x - second[i].x) - c) * second[i].w;
    out.push_back(summarize(x, v, skipped, std::nullopt));
  }
  return out;
}

MeanEstimate ibp_residual(const QuadBatch& b, const SmoothFn& phi, double eps) {
  require_nonempty(b.size());
  require_positive(eps);
  std::vector<double> v(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& q = b.samples()[i];
    v[i] = phi.d2(q.x()) * q.gamma() / (eps + q.gamma()) + phi.d1(q.x()) * regularized_weight(q, eps);
  }
  return mean_estimate(v);
}

MeanEstimate generator_centering(const QuadBatch& b, const SmoothFn& phi) {
  require_nonempty(b.size());
  std::vector<double> v(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& q = b.samples()[i];
    v[i] = phi.d1(q.x()) * q.a() + 0.5 * phi.d2(q.x()) * q.gamma();
  }
  return mean_estimate(v);
}

MeanEstimate weight_centering(const QuadBatch& b, std::optional<double> eps) {
  require_nonempty(b.size());
  std::vector<double> v;
  v.reserve(b.size());
  for (const auto& q : b.samples()) {
    if (eps) {
      v.push_back(regularized_weight(q, *eps));
    } else if (auto w = direct_weight(q)) {
      v.push_back(*w);
    }
  }
  if (v.empty()) throw std::runtime_error("no usable samples");
  return mean_estimate(v);
}

SmoothFn identity_fn() {
  return {[](double x) { return x; }, [](double) { return 1.0; }, [](double) { return 0.0; }};
}

SmoothFn square_fn() {
  return {[](double x) { return x * x; }, [](double x) { return 2.0 * x; }, [](double) { return 2.0; }};
}

SmoothFn cosine_fn() {
  return {[](double x) { return std::cos(x); }, [](double x) { return -std::sin(x); },
          [](double x) { return -std::cos(x); }};
}

}  // namespace dmc
