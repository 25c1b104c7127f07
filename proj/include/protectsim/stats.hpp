#pragma once

// Small statistics toolkit: log-log power-law fits, Kolmogorov-Smirnov
// goodness of fit, chi-squared CDF, and an ordered parallel map.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace protectsim::stats {

struct PowerLawFit {
  double exponent = 0.0;          // p in y = A x^p
  double exponent_stderr = 0.0;
  double coefficient = 0.0;       // A
  double residual_rms = 0.0;      // rms of log-space residuals
  std::size_t points = 0;
};

// Unweighted least squares of log y on log x. ConfigError for fewer than 3
// points or non-positive values.
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> v);
// Unbiased sample variance; needs at least two values.
double variance(std::span<const double> v);

double chi_squared_cdf(double x, double dof);

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

// One-sample KS test against a continuous CDF. The p-value uses the
// asymptotic Kolmogorov distribution with the Stephens small-n correction.
KsResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf);
double kolmogorov_survival(double lambda);

// Worker count: hardware concurrency capped by PROTECTSIM_THREADS (>= 1).
std::size_t worker_count(std::size_t jobs);

// Evaluates f(0..n-1) on up to worker_count(n) threads; results are returned in
// index order. The first exception thrown by any job is rethrown.
template <class T>
std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)>& f);

}  // namespace protectsim::stats

#include "protectsim/detail/parallel_map.hpp"
