#pragma once

// Repeated weak QND readout with Gaussian prior and Gaussian reading noise,
// plus the protective-vs-conventional ensemble-size comparison.

#include <cstdint>
#include <vector>

#include "protectsim/protect.hpp"

namespace protectsim::qnd {

struct QndPosterior {
  double mean = 0.0;
  double variance = 0.0;  // may be +inf for a flat prior
  std::size_t k = 0;
};

// Conjugate Gaussian update with reading noise variance var_m (> 0, +inf
// allowed). ConfigError for non-positive variances.
QndPosterior posterior_update(const QndPosterior& prior, double reading, double var_m);

// (1/var0 + k/var_m)^-1
double posterior_variance_closed_form(double var0, double var_m, std::size_t k);
// var_k (n0/var0 + sum(readings)/var_m)
QndPosterior posterior_closed_form(double n0, double var0, double var_m, const std::vector<double>& readings);

struct QndParams {
  double n0 = 0.0;
  double var0 = 1.0;
  double var_m = 1.0;
  std::size_t k = 2;
  bool operator==(const QndParams&) const = default;
};

struct QndTrace {
  QndParams params;
  std::uint64_t seed = 0;
  std::vector<double> readings;
  double mean = 0.0;         // n-bar
  double spread = 0.0;       // sum (n_i - n-bar)^2 / (k - 1)
  double S = 0.0;            // (k - 1) spread / var_m
  std::vector<QndPosterior> posteriors;  // after each reading

  // Recomputes mean, spread and S from the readings; true if they agree with
  // the stored values within `tol`.
  bool consistent(double tol = 1e-12) const;
};

// Reading i is drawn from the predictive law of the current posterior,
// N(mean_{i-1}, var_{i-1} + var_m), then the posterior is updated. The joint
// law equals a latent value from N(n0, var0) read k times with independent
// noise. ConfigError unless k >= 2.
QndTrace simulate_qnd_sequence(const QndParams& p, std::uint64_t seed);

// Trace i uses seed base_seed + i.
std::vector<QndTrace> simulate_traces(const QndParams& p, std::size_t count, std::uint64_t base_seed);

struct EstimatorSummary {
  QndParams params;
  std::size_t traces = 0;
  double alpha = 0.01;
  double rel_tol = 0.05;

  double mean_of_mean = 0.0;
  double mean_standard_error = 0.0;  // sqrt((var0 + var_m/k) / traces)
  bool mean_centered = false;        // within 3 standard errors of n0

  double variance_of_mean = 0.0;
  double expected_variance_of_mean = 0.0;
  bool variance_of_mean_ok = false;

  double mean_spread = 0.0;
  bool spread_centered = false;  // within rel_tol of var_m

  double ks_statistic = 0.0;
  double ks_p_value = 0.0;
  bool ks_ok = false;

  double center_variance = 0.0;
  double expected_center_variance = 0.0;  // (k/var_m) var0 var_k
  bool center_diffusion_ok = false;

  bool all_ok() const;
};

// ConfigError for fewer than 100 traces or mixed parameters.
EstimatorSummary estimator_stats(const std::vector<QndTrace>& traces, double alpha = 0.01, double rel_tol = 0.05);

struct EnsembleComparison {
  double c = 0.0;
  double T = 0.0;
  double x_perp = 0.0;
  double n_p = 1.0;
  double eps_p = 0.0;
  double n_c = 0.0;
};

// eps_p = c^2/T^2 sqrt(x_perp^2 + 1/N_p), N_c = T^4/c^4 / (x_perp^2 + 1/N_p).
// N_p may be +inf. NumericError if eps_p^2 N_c deviates from 1 by > 1e-12.
EnsembleComparison ensemble_comparison(double c, double T, double x_perp, double n_p);

// Uses the run's final pointer mean and variance as n0 and var0. k = 1 yields a
// single noisy reading.
QndTrace readout_bridge(const protect::ProtectiveRunResult& run, double var_m, std::size_t k, std::uint64_t seed);

}  // namespace protectsim::qnd
