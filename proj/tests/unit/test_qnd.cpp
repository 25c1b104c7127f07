#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "protectsim/errors.hpp"
#include "protectsim/qnd.hpp"

using namespace protectsim;
using namespace protectsim::qnd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sample_variance(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST_CASE("posterior updates") {
  CHECK(posterior_variance_closed_form(4.0, 1.0, 4) == doctest::Approx(4.0 / 17.0).epsilon(1e-14));

  QndPosterior prior{3.0, 4.0, 0};
  auto same = posterior_update(prior, 100.0, kInf);
  CHECK(same.mean == 3.0);
  CHECK(same.variance == 4.0);

  auto flat = posterior_update({0.0, kInf, 0}, 2.5, 0.7);
  CHECK(flat.mean == 2.5);
  CHECK(flat.variance == 0.7);
  CHECK(flat.k == 1);

  CHECK_THROWS_AS(posterior_update(prior, 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(posterior_update({0.0, -1.0, 0}, 1.0, 1.0), ConfigError);
}

TEST_CASE("recursion agrees with the closed form") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 10.0), r(-20.0, 20.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double n0 = r(rng), var0 = u(rng), var_m = u(rng);
    std::vector<double> readings;
    QndPosterior post{n0, var0, 0};
    double prev_var = var0;
    double lo = n0, hi = n0;
    for (int i = 0; i < 25; ++i) {
      readings.push_back(r(rng));
      lo = std::min(lo, readings.back());
      hi = std::max(hi, readings.back());
      post = posterior_update(post, readings.back(), var_m);
      CHECK(post.variance < prev_var);
      prev_var = post.variance;
      CHECK(post.mean >= lo - 1e-12);
      CHECK(post.mean <= hi + 1e-12);
      auto closed = posterior_closed_form(n0, var0, var_m, readings);
      CHECK(std::abs(closed.variance - post.variance) <= 1e-12 * closed.variance);
      CHECK(std::abs(closed.mean - post.mean) <= 1e-12 * std::max(1.0, std::abs(closed.mean)));
      CHECK(std::abs(posterior_variance_closed_form(var0, var_m, readings.size()) - post.variance) <=
            1e-12 * post.variance);
    }
  }
}

TEST_CASE("traces are reproducible and self-consistent") {
  QndParams p{5.0, 4.0, 1.0, 10};
  auto a = simulate_qnd_sequence(p, 42);
  auto b = simulate_qnd_sequence(p, 42);
  auto c = simulate_qnd_sequence(p, 43);
  CHECK(a.readings == b.readings);
  CHECK(a.readings != c.readings);
  CHECK(a.readings.size() == 10);
  CHECK(a.posteriors.size() == 10);
  CHECK(a.consistent());
  CHECK(a.S == doctest::Approx(9.0 * a.spread / 1.0));
  CHECK_THROWS_AS(simulate_qnd_sequence({0, 1, 1, 1}, 1), ConfigError);

  auto batch = simulate_traces(p, 8, 100);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    CHECK(batch[i].seed == 100 + i);
    CHECK(batch[i].readings == simulate_qnd_sequence(p, 100 + i).readings);
  }
}

TEST_CASE("estimator distributions on 10^4 traces") {
  QndParams p{5.0, 4.0, 1.0, 10};
  auto traces = simulate_traces(p, 10000, 1);
  std::vector<double> means, centres;
  for (const auto& t : traces) {
    means.push_back(t.mean);
    centres.push_back(t.posteriors.back().mean);
  }
  const double var_mean = sample_variance(means);
  CHECK(std::abs(var_mean / (4.0 + 1.0 / 10) - 1.0) < 0.05);
  const double var_k = posterior_variance_closed_form(4.0, 1.0, 10);
  CHECK(std::abs(sample_variance(centres) / (10.0 / 1.0 * 4.0 * var_k) - 1.0) < 0.05);

  auto summary = estimator_stats(traces);
  CHECK(summary.mean_centered);
  CHECK(summary.variance_of_mean_ok);
  CHECK(summary.spread_centered);
  CHECK(summary.ks_ok);
  CHECK(summary.ks_p_value > 0.01);
  CHECK(summary.center_diffusion_ok);
  CHECK(summary.all_ok());
  CHECK(summary.variance_of_mean == doctest::Approx(var_mean).epsilon(1e-12));
}

TEST_CASE("spread estimator ignores the prior width") {
  for (double var0 : {1.0, 4.0, 16.0}) {
    auto s = estimator_stats(simulate_traces({0.0, var0, 1.0, 10}, 10000, 77));
    CHECK(std::abs(s.mean_spread - 1.0) < 0.05);
  }
}

TEST_CASE("a wrong noise model fails the checks") {
  auto traces = simulate_traces({0.0, 4.0, 2.0, 10}, 10000, 3);
  // Pretend the noise variance were 1: rescale S by hand.
  for (auto& t : traces) {
    t.S = 9.0 * t.spread / 1.0;
    t.params.var_m = 1.0;
  }
  auto s = estimator_stats(traces);
  CHECK_FALSE(s.ks_ok);
  CHECK_FALSE(s.spread_centered);
}

TEST_CASE("estimator input checks") {
  auto few = simulate_traces({0.0, 1.0, 1.0, 4}, 50, 1);
  CHECK_THROWS_AS(estimator_stats(few), ConfigError);
  auto mixed = simulate_traces({0.0, 1.0, 1.0, 4}, 150, 1);
  mixed[7].params.var0 = 2.0;
  CHECK_THROWS_AS(estimator_stats(mixed), ConfigError);
}

TEST_CASE("ensemble comparison") {
  auto e = ensemble_comparison(1, 10, 1, 100);
  CHECK(std::abs(e.eps_p / 0.0100499 - 1.0) < 1e-4);
  CHECK(std::abs(e.n_c / 9900.99 - 1.0) < 1e-4);

  auto lim = ensemble_comparison(1, 10, 0, kInf);
  CHECK(lim.eps_p == 0.0);
  CHECK(std::isinf(lim.n_c));

  auto twice = ensemble_comparison(1, 20, 1, 100);
  CHECK(twice.n_c / e.n_c == doctest::Approx(16.0).epsilon(1e-12));

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> c(0.1, 5), T(1, 1000), x(0, 3), n(1, 1e6);
  for (int i = 0; i < 100; ++i) {
    auto r = ensemble_comparison(c(rng), T(rng), x(rng), std::floor(n(rng)));
    CHECK(std::abs(r.eps_p * r.eps_p * r.n_c - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(ensemble_comparison(1, 0, 1, 100), ConfigError);
  CHECK_THROWS_AS(ensemble_comparison(1, 10, 1, 0.5), ConfigError);
  CHECK_THROWS_AS(ensemble_comparison(0, 10, 1, 100), ConfigError);
}

TEST_CASE("readout bridge from a protective run") {
  models::PacketParams pk;
  pk.width = 50.0;
  pk.extent = 800.0;
  pk.points = 256;
  auto s = models::build_aav_spin(models::SpinFieldParams::with_angle(1, 1, 0.1, std::numbers::pi / 3), pk);
  auto run = protect::run_protective(s, evolve::CouplingProfile::rectangular(200.0), {1, 0});
  const double var0 = run.pointer_width_after * run.pointer_width_after;

  auto t = readout_bridge(run, 0.01, 50, 21);
  CHECK(std::abs(t.mean - (run.pointer_mean_before + 0.05)) < 3 * std::sqrt(var0 + 0.01 / 50));

  auto single = readout_bridge(run, 0.01, 1, 21);
  REQUIRE(single.readings.size() == 1);
  CHECK(single.mean == single.readings[0]);

  // Noise-dominated regime: Var(n-bar) falls as 1/k.
  auto spread_of = [&](std::size_t k) {
    std::vector<double> m;
    for (std::uint64_t seed = 0; seed < 4000; ++seed) m.push_back(readout_bridge(run, 1.0, k, seed).mean);
    return sample_variance(m);
  };
  const double r = spread_of(10) / spread_of(40);
  CHECK(r == doctest::Approx((var0 + 0.1) / (var0 + 0.025)).epsilon(0.1));
  CHECK(r > 3.5);
}
