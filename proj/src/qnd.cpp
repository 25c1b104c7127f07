#include "protectsim/qnd.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <boost/random/normal_distribution.hpp>

#include "protectsim/errors.hpp"
#include "protectsim/stats.hpp"

namespace protectsim::qnd {

namespace {

void require_variance(double v, const char* what) {
  if (!(v > 0.0)) throw ConfigError(std::string(what) + " must be > 0");
}

QndTrace simulate(const QndParams& p, std::uint64_t seed) {
  require_variance(p.var0, "var0");
  require_variance(p.var_m, "var_m");
  if (!std::isfinite(p.var0) || !std::isfinite(p.var_m)) throw ConfigError("QND variances must be finite");
  if (p.k < 1) throw ConfigError("k must be >= 1");
  QndTrace t;
  t.params = p;
  t.seed = seed;
  std::mt19937_64 rng(seed);
  boost::random::normal_distribution<double> unit(0.0, 1.0);
  QndPosterior post{p.n0, p.var0, 0};
  for (std::size_t i = 0; i < p.k; ++i) {
    const double reading = post.mean + std::sqrt(post.variance + p.var_m) * unit(rng);
    t.readings.push_back(reading);
    post = posterior_update(post, reading, p.var_m);
    t.posteriors.push_back(post);
  }
  t.mean = stats::mean(t.readings);
  if (p.k >= 2) {
    t.spread = stats::variance(t.readings);
    t.S = static_cast<double>(p.k - 1) * t.spread / p.var_m;
  }
  return t;
}

}  // namespace

QndPosterior posterior_update(const QndPosterior& prior, double reading, double var_m) {
  require_variance(prior.variance, "prior variance");
  require_variance(var_m, "reading variance");
  if (std::isinf(var_m)) return {prior.mean, prior.variance, prior.k + 1};
  if (std::isinf(prior.variance)) return {reading, var_m, prior.k + 1};
  const double precision = 1.0 / prior.variance + 1.0 / var_m;
  const double var = 1.0 / precision;
  return {var * (prior.mean / prior.variance + reading / var_m), var, prior.k + 1};
}

double posterior_variance_closed_form(double var0, double var_m, std::size_t k) {
  require_variance(var0, "var0");
  require_variance(var_m, "var_m");
  return 1.0 / (1.0 / var0 + static_cast<double>(k) / var_m);
}

QndPosterior posterior_closed_form(double n0, double var0, double var_m, const std::vector<double>& readings) {
  const double var = posterior_variance_closed_form(var0, var_m, readings.size());
  double sum = 0.0;
  for (double r : readings) sum += r;
  return {var * (n0 / var0 + sum / var_m), var, readings.size()};
}

bool QndTrace::consistent(double tol) const {
  if (readings.size() != params.k || posteriors.size() != params.k) return false;
  const double m = stats::mean(readings);
  if (std::abs(m - mean) > tol * std::max(1.0, std::abs(m))) return false;
  if (params.k < 2) return true;
  const double v = stats::variance(readings);
  const double s = static_cast<double>(params.k - 1) * v / params.var_m;
  return std::abs(v - spread) <= tol * std::max(1.0, v) && std::abs(s - S) <= tol * std::max(1.0, s);
}

QndTrace simulate_qnd_sequence(const QndParams& p, std::uint64_t seed) {
  if (p.k < 2) throw ConfigError("simulate_qnd_sequence needs k >= 2");
  return simulate(p, seed);
}

std::vector<QndTrace> simulate_traces(const QndParams& p, std::size_t count, std::uint64_t base_seed) {
  if (p.k < 2) throw ConfigError("simulate_qnd_sequence needs k >= 2");
  return stats::parallel_map<QndTrace>(count, [&](std::size_t i) { return simulate(p, base_seed + i); });
}

bool EstimatorSummary::all_ok() const {
  return mean_centered && variance_of_mean_ok && spread_centered && ks_ok && center_diffusion_ok;
}

EstimatorSummary estimator_stats(const std::vector<QndTrace>& traces, double alpha, double rel_tol) {
  if (traces.size() < 100) throw ConfigError("estimator_stats needs at least 100 traces");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  const QndParams p = traces.front().params;
  if (p.k < 2) throw ConfigError("estimator_stats needs k >= 2");
  std::vector<double> means, spreads, S, centres;
  for (const QndTrace& t : traces) {
    if (!(t.params == p)) throw ConfigError("estimator_stats: traces have heterogeneous parameters");
    means.push_back(t.mean);
    spreads.push_back(t.spread);
    S.push_back(t.S);
    centres.push_back(t.posteriors.back().mean);
  }
  EstimatorSummary out;
  out.params = p;
  out.traces = traces.size();
  out.alpha = alpha;
  out.rel_tol = rel_tol;
  const double n = static_cast<double>(traces.size());
  const double k = static_cast<double>(p.k);

  out.mean_of_mean = stats::mean(means);
  out.expected_variance_of_mean = p.var0 + p.var_m / k;
  out.mean_standard_error = std::sqrt(out.expected_variance_of_mean / n);
  out.mean_centered = std::abs(out.mean_of_mean - p.n0) <= 3.0 * out.mean_standard_error;
  out.variance_of_mean = stats::variance(means);
  out.variance_of_mean_ok =
      std::abs(out.variance_of_mean - out.expected_variance_of_mean) <= rel_tol * out.expected_variance_of_mean;

  out.mean_spread = stats::mean(spreads);
  out.spread_centered = std::abs(out.mean_spread - p.var_m) <= rel_tol * p.var_m;

  const stats::KsResult ks = stats::ks_test(S, [&](double x) { return stats::chi_squared_cdf(x, k - 1.0); });
  out.ks_statistic = ks.statistic;
  out.ks_p_value = ks.p_value;
  out.ks_ok = ks.p_value > alpha;

  const double var_k = posterior_variance_closed_form(p.var0, p.var_m, p.k);
  out.center_variance = stats::variance(centres);
  out.expected_center_variance = (k / p.var_m) * p.var0 * var_k;
  out.center_diffusion_ok =
      std::abs(out.center_variance - out.expected_center_variance) <= rel_tol * out.expected_center_variance;
  return out;
}

EnsembleComparison ensemble_comparison(double c, double T, double x_perp, double n_p) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("ensemble_comparison: T must be > 0");
  if (!(n_p >= 1.0)) throw ConfigError("ensemble_comparison: N_p must be >= 1");
  if (!(c != 0.0) || !std::isfinite(c)) throw ConfigError("ensemble_comparison: c must be nonzero");
  if (!std::isfinite(x_perp)) throw ConfigError("ensemble_comparison: X_perp must be finite");
  EnsembleComparison e{c, T, x_perp, n_p, 0.0, 0.0};
  const double q = x_perp * x_perp + 1.0 / n_p;
  const double r = (c * c) / (T * T);
  e.eps_p = r * std::sqrt(q);
  e.n_c = q > 0.0 ? 1.0 / (r * r * q) : std::numeric_limits<double>::infinity();
  if (q > 0.0) {
    const double identity = e.eps_p * e.eps_p * e.n_c;
    if (std::abs(identity - 1.0) > 1e-12) {
      throw NumericError("eps_p^2 N_c = " + std::to_string(identity) + " deviates from 1");
    }
  }
  return e;
}

QndTrace readout_bridge(const protect::ProtectiveRunResult& run, double var_m, std::size_t k, std::uint64_t seed) {
  const double var0 = run.pointer_width_after * run.pointer_width_after;
  if (!(var0 > 0.0)) throw PhysicsError("readout_bridge: pointer has zero width");
  return simulate({run.pointer_mean_after, var0, var_m, k}, seed);
}

}  // namespace protectsim::qnd
