#include "dirichlet_mc/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "dirichlet_mc/estimators.hpp"
#include "dirichlet_mc/scenarios.hpp"
#include "dirichlet_mc/sweeps.hpp"

namespace dmc {

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Options {
  std::string command;
  std::string scenario;
  std::string estimator;
  std::optional<double> epsilon;
  std::vector<double> epsilons;
  std::string samples;
  std::vector<double> points;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string out;
  std::string config;
  bool strict = false;
  bool rates = false;
  double lambda = 5.0;
  std::string h = "identity";
  std::size_t steps = 16;
  double a_offset = 0.0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double d = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), d);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ValidationError(key + ": not a number: '" + v + "'");
  return d;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& v) {
  std::uint64_t u = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), u);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ValidationError(key + ": not a non-negative integer: '" + v + "'");
  return u;
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ValidationError(key + ": not a boolean: '" + v + "'");
}

// Flat `key = value` file; '#' starts a comment. Keys are the long flag names.
void apply_config(Options& o) {
  std::ifstream in(o.config);
  if (!in) throw ValidationError("cannot open config file '" + o.config + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError(o.config + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "scenario") o.scenario = val;
    else if (key == "estimator") o.estimator = val;
    else if (key == "epsilon") o.epsilon = parse_double(key, val);
    else if (key == "epsilons") o.epsilons = parse_list(key, val);
    else if (key == "samples") o.samples = val;
    else if (key == "points") o.points = parse_list(key, val);
    else if (key == "seed") o.seed = parse_unsigned(key, val);
    else if (key == "workers") o.workers = static_cast<unsigned>(parse_unsigned(key, val));
    else if (key == "out") o.out = val;
    else if (key == "strict") o.strict = parse_bool(key, val);
    else if (key == "rates") o.rates = parse_bool(key, val);
    else if (key == "lambda") o.lambda = parse_double(key, val);
    else if (key == "point-function") o.h = val;
    else if (key == "steps") o.steps = parse_unsigned(key, val);
    else if (key == "inject-a-offset") o.a_offset = parse_double(key, val);
    else throw ValidationError(o.config + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
}

ScenarioParams scenario_params(const Options& o) {
  ScenarioParams p;
  if (!(o.lambda > 0.0)) throw ValidationError("--lambda must be positive");
  p.poisson_lambda = o.lambda;
  p.poisson_h = parse_point_function(o.h);
  if (o.steps == 0) throw ValidationError("--steps must be positive");
  p.euler_steps = o.steps;
  return p;
}

// nullopt means quadrature.
std::optional<std::size_t> parse_samples(const std::string& v, std::optional<std::size_t> fallback) {
  if (v.empty()) return fallback;
  if (v == "quadrature") return std::nullopt;
  const auto n = parse_unsigned("--samples", v);
  if (n == 0) throw ValidationError("--samples must be positive");
  return static_cast<std::size_t>(n);
}

std::size_t mc_samples(const Options& o, std::size_t fallback) {
  const auto n = parse_samples(o.samples, fallback);
  if (!n) throw ValidationError("--samples quadrature is only available for sweeps");
  return *n;
}

class Csv {
public:
  explicit Csv(std::ostream& os) : os_(os) {}
  void header(const std::string& h) { os_ << h << '\n'; }
  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((os_ << (first ? "" : ",") << cell(cells), first = false), ...);
    os_ << '\n';
  }

private:
  static std::string cell(double v) { return csv_number(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(std::optional<double> v) { return v ? csv_number(*v) : std::string(); }
  std::ostream& os_;
};

struct Streams {
  std::ostream* csv;
  std::ostream* summary;
  std::unique_ptr<std::ofstream> file;
};

Streams open_streams(const Options& o, std::ostream& out, std::ostream& err) {
  Streams s{&out, &err, nullptr};
  if (!o.out.empty()) {
    s.file = std::make_unique<std::ofstream>(o.out, std::ios::binary);
    if (!*s.file) throw ValidationError("cannot open output file '" + o.out + "'");
    s.csv = s.file.get();
    s.summary = &out;
  }
  return s;
}

int cmd_list(std::ostream& out) {
  for (const auto& name : scenario_names()) {
    const Scenario s = make_scenario(name);
    out << name << ": " << s.description << '\n';
  }
  return kExitOk;
}

SweepConfig sweep_config(const Options& o, std::vector<double> default_eps, std::vector<double> default_points) {
  SweepConfig c;
  c.scenario = o.scenario.empty() ? "lognormal" : o.scenario;
  c.estimator = parse_kernel_estimator(o.estimator.empty() ? "shifted" : o.estimator);
  c.epsilons = o.epsilons.empty() ? std::move(default_eps) : o.epsilons;
  if (o.epsilon && o.epsilons.empty()) c.epsilons = {*o.epsilon};
  c.samples = parse_samples(o.samples, std::nullopt);
  c.points = o.points.empty() ? std::move(default_points) : o.points;
  c.seed = o.seed;
  c.workers = o.workers;
  c.params = scenario_params(o);
  return c;
}

void write_sweep(Csv& csv, const SweepResult& r) {
  csv.header("epsilon,n,x,estimate,reference,abs_error,std_error");
  for (const auto& row : r.rows)
    csv.row(row.epsilon, row.n, row.x, row.estimate, row.reference, row.abs_error, row.std_error);
}

int cmd_sweep_bias(const Options& o, Streams& io) {
  const SweepConfig cfg = sweep_config(o, {0.2, 0.1, 0.05, 0.025}, {1.0});
  const SweepResult r = run_bias_sweep(cfg);
  Csv csv(*io.csv);
  write_sweep(csv, r);
  for (const auto& n : r.notices) *io.summary << "notice: " << n << '\n';

  const bool shifted = cfg.estimator == KernelEstimator::shifted;
  const double lo = shifted ? 1.7 : 0.7;
  const double hi = shifted ? 2.3 : 1.3;
  bool ok = true;
  for (std::size_t i = 0; i < r.slopes.size(); ++i) {
    const double slope = r.slopes[i];
    const bool in = slope >= lo && slope <= hi;
    ok = ok && in;
    *io.summary << "sweep-bias " << cfg.scenario << " " << to_string(cfg.estimator) << " x=" << csv_number(cfg.points[i])
                << " slope=" << csv_number(slope) << " expected=[" << csv_number(lo) << "," << csv_number(hi) << "] "
                << (in ? "ok" : "outside") << '\n';
  }
  return (o.strict && !ok) ? kExitThreshold : kExitOk;
}

int cmd_sweep_variance(const Options& o, Streams& io) {
  const SweepConfig cfg = sweep_config(o, {0.008, 0.004, 0.002, 0.001}, {1.0});
  const SweepResult r = run_variance_sweep(cfg);
  Csv csv(*io.csv);
  write_sweep(csv, r);
  for (const auto& n : r.notices) *io.summary << "notice: " << n << '\n';

  bool ok = true;
  const std::size_t per_point = cfg.epsilons.size();
  for (std::size_t i = 0; i < r.slopes.size(); ++i) {
    const SweepRow& last = r.rows[i * per_point + per_point - 1];
    const double rel = last.abs_error / last.reference;
    const bool slope_ok = r.slopes[i] >= -0.65 && r.slopes[i] <= -0.35;
    const bool const_ok = rel <= 0.05;
    ok = ok && slope_ok && const_ok;
    *io.summary << "sweep-variance " << cfg.scenario << " x=" << csv_number(cfg.points[i])
                << " slope=" << csv_number(r.slopes[i]) << " limit=" << csv_number(last.reference)
                << " scaled_var=" << csv_number(last.estimate) << " rel_error=" << csv_number(rel) << " "
                << (slope_ok && const_ok ? "ok" : "outside") << '\n';
  }
  return (o.strict && !ok) ? kExitThreshold : kExitOk;
}

std::vector<double> query_points(const Options& o, const Scenario& s) {
  if (!o.points.empty()) return o.points;
  if (s.check_points.empty()) throw ValidationError("scenario '" + s.name + "' has no default points; pass --points");
  return s.check_points;
}

std::vector<DensityEstimate> estimate_density(const std::string& estimator, const Options& o, const Scenario& s,
                                              const QuadBatch& batch, const std::vector<double>& xs) {
  if (estimator == "direct") {
    if (!s.direct_admissible)
      throw ValidationError("scenario '" + s.name + "' needs the regularized estimator (1/Gamma is not integrable)");
    return direct_density(batch, xs);
  }
  if (estimator == "regularized") return regularized_density(batch, o.epsilon.value_or(s.regularization), xs);
  if (estimator == "centered") {
    if (!s.direct_admissible)
      throw ValidationError("scenario '" + s.name + "' needs the regularized estimator (1/Gamma is not integrable)");
    return centered_direct_density(batch, xs);
  }
  const KernelEstimator k = parse_kernel_estimator(estimator);
  const double eps = o.epsilon.value_or(0.01);
  if (!(eps > 0.0)) throw ValidationError("--epsilon must be positive");
  const TripleBatch triples = batch.triples();
  const QueryPoints q = scalar_points(xs);
  switch (k) {
    case KernelEstimator::shifted:
      return shifted_kernel_density(triples, eps, q);
    case KernelEstimator::plain_gamma:
      return plain_kernel_density(triples, eps, q, PlainKernel::gamma_cov);
    case KernelEstimator::plain_identity:
      return plain_kernel_density(triples, eps, q, PlainKernel::identity_cov);
  }
  return {};
}

void check_estimator_name(const std::string& name) {
  static const std::vector<std::string> direct{"direct", "regularized", "centered"};
  if (std::find(direct.begin(), direct.end(), name) != direct.end()) return;
  try {
    parse_kernel_estimator(name);
  } catch (const UnknownName&) {
    throw UnknownName("unknown estimator '" + name +
                      "' (valid: direct, regularized, centered, shifted, plain_gamma, plain_identity)");
  }
}

int cmd_density(const Options& o, Streams& io) {
  const Scenario s = make_scenario(o.scenario.empty() ? "gaussian" : o.scenario, scenario_params(o));
  const std::string estimator = o.estimator.empty() ? (s.direct_admissible ? "direct" : "regularized") : o.estimator;
  check_estimator_name(estimator);
  const std::vector<double> xs = query_points(o, s);
  const std::size_t n = mc_samples(o, 100000);
  const QuadBatch batch = sample_quads(s, n, o.seed, o.workers);
  const auto est = estimate_density(estimator, o, s, batch, xs);

  Csv csv(*io.csv);
  csv.header("x,estimate,std_error,reference");
  bool ok = true;
  for (const auto& e : est) {
    std::optional<double> ref;
    if (s.exact_density) ref = s.exact_density(e.point());
    csv.row(e.point(), e.value, e.std_error, ref);
    if (ref) {
      const double z = e.std_error > 0 ? std::abs(e.value - *ref) / e.std_error : (e.value == *ref ? 0.0 : INFINITY);
      ok = ok && z <= 4.0;
      *io.summary << "density " << s.name << " " << estimator << " x=" << csv_number(e.point())
                  << " estimate=" << csv_number(e.value) << " std_error=" << csv_number(e.std_error)
                  << " reference=" << csv_number(*ref) << " z=" << csv_number(z) << '\n';
    } else {
      *io.summary << "density " << s.name << " " << estimator << " x=" << csv_number(e.point())
                  << " estimate=" << csv_number(e.value) << " std_error=" << csv_number(e.std_error) << '\n';
    }
  }
  if (batch.invalid_count() > 0) *io.summary << "notice: " << batch.invalid_count() << " invalid samples dropped\n";
  return (o.strict && !ok) ? kExitThreshold : kExitOk;
}

int cmd_identities(const Options& o, Streams& io) {
  const Scenario s = make_scenario(o.scenario.empty() ? "gaussian" : o.scenario, scenario_params(o));
  const std::size_t n = mc_samples(o, 100000);
  const IdentityReport r = run_identity_suite(s, n, o.seed, o.workers, o.a_offset);
  Csv csv(*io.csv);
  csv.header("scenario,check,parameter,mean,std_error,z,pass");
  double worst = 0.0;
  for (const auto& c : r.checks) {
    csv.row(r.scenario, c.name, c.parameter, c.stat.mean, c.stat.std_error, c.stat.z(), c.passed ? "true" : "false");
    worst = std::max(worst, std::abs(c.stat.z()));
  }
  *io.summary << "check-identities " << s.name << " checks=" << r.checks.size() << " max_abs_z=" << csv_number(worst)
              << " " << (r.passed() ? "pass" : "fail") << '\n';
  return (o.strict && !r.passed()) ? kExitThreshold : kExitOk;
}

int cmd_compare(const Options& o, Streams& io) {
  const Scenario s = make_scenario(o.scenario.empty() ? "lognormal" : o.scenario, scenario_params(o));
  const std::vector<double> xs = query_points(o, s);
  Csv csv(*io.csv);

  if (o.rates) {
    if (!s.quadrature_capable()) throw ValidationError("scenario '" + s.name + "' has no quadrature support");
    std::vector<double> sizes{1e3, 1e4, 1e5, 1e6, 1e7};
    csv.header("estimator,x,n,best_epsilon,bias,variance,mse");
    for (double x : xs) {
      for (const auto& r : run_rate_table(s, x, sizes))
        csv.row(to_string(r.estimator), x, r.n, r.best_epsilon, r.bias, r.variance, r.mse);
    }
    *io.summary << "compare --rates " << s.name << " points=" << xs.size() << '\n';
    return kExitOk;
  }

  const std::size_t n = mc_samples(o, 100000);
  const QuadBatch batch = sample_quads(s, n, o.seed, o.workers);
  std::vector<std::string> estimators;
  if (s.direct_admissible) {
    estimators = {"direct", "centered"};
  } else {
    estimators = {"regularized"};
  }
  for (const char* k : {"shifted", "plain_gamma", "plain_identity"}) estimators.emplace_back(k);
  if (!o.estimator.empty()) {
    check_estimator_name(o.estimator);
    estimators = {o.estimator};
  }

  csv.header("estimator,x,estimate,std_error,reference,abs_error");
  for (const auto& name : estimators) {
    for (const auto& e : estimate_density(name, o, s, batch, xs)) {
      std::optional<double> ref;
      std::optional<double> err;
      if (s.exact_density) {
        ref = s.exact_density(e.point());
        err = std::abs(e.value - *ref);
      }
      csv.row(name, e.point(), e.value, e.std_error, ref, err);
    }
  }
  *io.summary << "compare " << s.name << " estimators=" << estimators.size() << " points=" << xs.size()
              << " n=" << n << '\n';
  return kExitOk;
}

void add_common(CLI::App* app, Options& o) {
  app->add_option("--scenario", o.scenario, "Scenario name (see list-scenarios)");
  app->add_option("--estimator", o.estimator, "Estimator name");
  app->add_option("--epsilon", o.epsilon, "Kernel width or regularisation");
  app->add_option("--epsilons", o.epsilons, "Decreasing eps sequence")->delimiter(',');
  app->add_option("--samples", o.samples, "Sample size N, or 'quadrature' for sweeps");
  app->add_option("--points", o.points, "Query points")->delimiter(',');
  app->add_option("--seed", o.seed, "Random seed (DIRICHLET_MC_SEED overrides)");
  app->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
  app->add_option("--out", o.out, "CSV output file (default: standard output)");
  app->add_option("--config", o.config, "Flat key = value file overriding flags");
  app->add_flag("--strict", o.strict, "Exit 3 when an acceptance threshold fails");
  app->add_option("--lambda", o.lambda, "Poisson intensity");
  app->add_option("--point-function", o.h, "Poisson point function: identity, sin, cubic");
  app->add_option("--steps", o.steps, "Euler steps");
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dirichlet-form Monte Carlo density estimation benchmarks", "dmc"};
  app.require_subcommand(1);
  Options o;

  app.add_subcommand("list-scenarios", "List the built-in scenarios");
  const std::vector<std::pair<const char*, const char*>> commands{
      {"density", "Density estimates at query points"},
      {"sweep-bias", "Kernel bias against eps with fitted order"},
      {"sweep-variance", "Scaled kernel variance against eps"},
      {"check-identities", "Centering and integration-by-parts z-scores"},
      {"compare", "All estimators side by side, or the MSE rate table with --rates"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, o);
    if (std::string(name) == "compare") sub->add_flag("--rates", o.rates, "Optimal-eps MSE against N");
    if (std::string(name) == "check-identities")
      sub->add_option("--inject-a-offset", o.a_offset, "Add a constant to A[X] (negative control)");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  o.command = app.get_subcommands().front()->get_name();

  try {
    if (o.command == "list-scenarios") return cmd_list(out);
    if (!o.config.empty()) apply_config(o);
    if (const char* env = std::getenv("DIRICHLET_MC_SEED"); env && *env)
      o.seed = parse_unsigned("DIRICHLET_MC_SEED", env);
    if (o.workers == 0) throw ValidationError("--workers must be positive");

    Streams io = open_streams(o, out, err);
    int code = kExitOk;
    if (o.command == "density") code = cmd_density(o, io);
    else if (o.command == "sweep-bias") code = cmd_sweep_bias(o, io);
    else if (o.command == "sweep-variance") code = cmd_sweep_variance(o, io);
    else if (o.command == "check-identities") code = cmd_identities(o, io);
    else if (o.command == "compare") code = cmd_compare(o, io);
    io.csv->flush();
    return code;
  } catch (const UnknownName& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace dmc
