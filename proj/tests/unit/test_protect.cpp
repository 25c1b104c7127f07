#include <doctest.h>

#include <cmath>
#include <numbers>

#include "protectsim/errors.hpp"
#include "protectsim/protect.hpp"
#include "support/aav_oracle.hpp"

using namespace protectsim;
using namespace protectsim::protect;
using evolve::CouplingProfile;

namespace {

models::PacketParams aav_packet(double extent = 800.0, double center = 0.0) {
  models::PacketParams pk;
  pk.width = 50.0;
  pk.extent = extent;
  pk.center = center;
  pk.points = 256;
  return pk;
}

models::Scenario aav(double bi = 0.1, models::PacketParams pk = aav_packet()) {
  return models::build_aav_spin(models::SpinFieldParams::with_angle(1, 1, bi, std::numbers::pi / 3), pk);
}

void check_invariants(const ProtectiveRunResult& r) {
  CHECK(r.system_fidelity >= 0.0);
  CHECK(r.system_fidelity <= 1.0 + 1e-10);
  CHECK(std::abs(r.system_fidelity + r.orthogonal_probability - 1.0) < 1e-12);
  CHECK(r.rho_system.min_eigenvalue() >= -1e-10);
  CHECK(std::abs(r.rho_system.trace() - 1.0) < 1e-10);
}

}  // namespace

TEST_CASE("pointer shift against the per-point oracle") {
  auto s = aav();
  auto r = run_protective(s, CouplingProfile::rectangular(200.0), {4096, 0});
  check_invariants(r);
  CHECK(std::abs(r.pointer_shift - 0.05) < 1e-3);
  CHECK(r.orthogonal_probability < 1e-3);
  REQUIRE(r.predicted_shift);
  CHECK(*r.predicted_shift == doctest::Approx(0.05));

  const auto& f = std::get<models::AavRecipe>(s.recipe).field;
  const auto& pk = std::get<models::AavRecipe>(s.recipe).packet;
  auto o = oracle::aav_solution(f.mu, f.b0, f.field_dir, f.bi, f.coupling_dir, pk.width, pk.center, pk.extent,
                                pk.points, 200.0, 1, oracle::flat(200.0));
  CHECK(std::abs(r.pointer_shift - o.shift) < 1e-8);
  CHECK(std::abs(r.orthogonal_probability - o.orthogonal_probability) < 1e-10);
  CHECK(std::abs(r.pointer_mean_before - o.momentum_before) < 1e-10);

  // Ramped schedule against the same oracle sliced identically.
  auto ramp = run_protective(s, CouplingProfile::smooth_ramp(50.0, 0.1), {500, 0});
  auto oramp = oracle::aav_solution(f.mu, f.b0, f.field_dir, f.bi, f.coupling_dir, pk.width, pk.center,
                                    pk.extent, pk.points, 50.0, 500, oracle::sine_ramp(50.0, 0.1));
  CHECK(std::abs(ramp.pointer_shift - oramp.shift) < 1e-8);
  CHECK(std::abs(ramp.orthogonal_probability - oramp.orthogonal_probability) < 1e-10);
}

TEST_CASE("zero coupling leaves pointer and system alone") {
  auto r = run_protective(aav(0.0), CouplingProfile::rectangular(100.0), {1, 0});
  CHECK(std::abs(r.pointer_shift) < 1e-10);
  CHECK(std::abs(r.system_fidelity - 1.0) < 1e-10);
  CHECK(std::abs(r.apparatus_width_after - r.apparatus_width_before) < 1e-10);
}

TEST_CASE("degenerate oscillators stay entangled") {
  models::OscillatorParams a;
  auto s = models::build_degenerate_oscillators(a, a, 1);
  const double want = std::pow(std::sin(0.5), 2);
  for (double T : {20.0, 40.0, 80.0}) {
    auto r = run_protective(s, CouplingProfile::rectangular(T), {1, 0});
    check_invariants(r);
    CHECK(std::abs(r.orthogonal_probability - want) < 1e-3);
  }
  auto scan = scan_T(s, {20, 40, 80, 160, 320}, ScanSettings{});
  REQUIRE(scan.orthogonal_fit);
  CHECK(std::abs(scan.orthogonal_fit->exponent) < 0.05);
  CHECK(scan.runs.back().orthogonal_probability > 0.2);
}

TEST_CASE("orthogonal probability falls as 1/T^2") {
  auto scan = scan_T(aav(), {25, 50, 100, 200, 400}, ScanSettings{});
  REQUIRE(scan.orthogonal_fit);
  CHECK(scan.orthogonal_fit->exponent == doctest::Approx(-2.0).epsilon(0.1));
  CHECK(scan.orthogonal_fit->exponent_stderr < 0.1);
  // p T^2 stays within a factor of two across the decade.
  double lo = 1e300, hi = 0;
  for (std::size_t i = 0; i < scan.Ts.size(); ++i) {
    const double v = scan.runs[i].orthogonal_probability * scan.Ts[i] * scan.Ts[i];
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi / lo < 2.0);
}

TEST_CASE("shift error falls as 1/T for an off-centre packet") {
  // A packet centred at x0 != 0 sees a first-order energy correction.
  auto s = aav(0.1, aav_packet(1000.0, 100.0));
  auto scan = scan_T(s, {50, 100, 200, 400, 800}, ScanSettings{});
  REQUIRE(scan.shift_error_fit);
  CHECK(scan.shift_error_fit->exponent == doctest::Approx(-1.0).epsilon(0.15));
  double a_max = 0;
  for (std::size_t i = 0; i < scan.Ts.size(); ++i)
    a_max = std::max(a_max, std::abs(scan.runs[i].pointer_shift - 0.05) * scan.Ts[i]);
  CHECK(a_max < 2.0);
}

TEST_CASE("scan argument checks") {
  auto s = aav();
  CHECK_THROWS_AS(scan_T(s, {25, 50, 100}, ScanSettings{}), ConfigError);
  CHECK_THROWS_AS(scan_T(s, {25, 50, 50, 400}, ScanSettings{}), ConfigError);
  CHECK_THROWS_AS(scan_T(s, {25, 30, 40, 50}, ScanSettings{}), ConfigError);
  try {
    scan_T(s, {25}, ScanSettings{});
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("need >= 4 T values") != std::string::npos);
  }
  ScanSettings ramp;
  ramp.kind = evolve::ProfileKind::smooth_ramp;
  ramp.slices_per_time = 20;
  CHECK(ramp.slices(50.0) == 1000);
  CHECK(ramp.profile(50.0).kind() == evolve::ProfileKind::smooth_ramp);
}

TEST_CASE("spreading of a momentum-coupled pointer") {
  models::PacketParams pk;
  pk.width = 1.0;
  pk.extent = 40.0;
  pk.points = 256;
  auto s = models::build_momentum_coupled(models::SpinFieldParams::with_angle(1, 1, 0.1, 0.0), pk, 1.0);
  auto r = spreading_report(s, 2.0);
  CHECK(r.predicted_width2 == doctest::Approx(2.5));
  CHECK(std::abs(r.measured_width2 / 2.5 - 1.0) < 0.02);
  auto zero = spreading_report(s, 0.0);
  CHECK(zero.measured_width2 == doctest::Approx(0.5).epsilon(0.01));

  // Strong static field, weak coupling: the width does not see the spin direction.
  std::vector<double> widths;
  for (double theta : {0.0, 0.9, 1.8, 2.7}) {
    auto f = models::SpinFieldParams::with_angle(1, 1000, 0.01, theta);
    widths.push_back(spreading_report(models::build_momentum_coupled(f, pk, 1.0), 2.0).measured_width2);
  }
  for (double w : widths) CHECK(std::abs(w - widths[0]) < 1e-6);

  CHECK_THROWS_AS(spreading_report(aav(), 2.0), ConfigError);
}

TEST_CASE("repeated readings estimate the shift") {
  // Box length commensurate with the packet phase pattern keeps the collapsed
  // packet periodic on the grid.
  auto s = aav(0.1, aav_packet(6 * 2 * std::numbers::pi / 0.05, 0.0));
  auto profile = CouplingProfile::smooth_ramp(200.0, 0.1);
  auto r = repeated_measurement_series(s, profile, {4000, 0}, {1000, 11, 4, true});
  REQUIRE(r.differences.size() == 1000);
  REQUIRE(r.readings.size() == 1001);
  const double m = stats::mean(r.differences);
  const double se = std::sqrt(stats::variance(r.differences) / 1000.0);
  CHECK(std::abs(m - 0.05) < 3 * se);
  CHECK(r.running_mean.back() == doctest::Approx(m));

  auto again = repeated_measurement_series(s, profile, {4000, 0}, {20, 11, 4, true});
  for (std::size_t i = 0; i < 20; ++i) CHECK(again.readings[i] == r.readings[i]);
}

TEST_CASE("repeated readings without coupling do not drift") {
  auto r = repeated_measurement_series(aav(0.0), CouplingProfile::rectangular(50.0), {1, 0}, {25, 3, 4, true});
  for (double d : r.differences) CHECK(d == 0.0);
  for (double f : r.system_fidelity) CHECK(f == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("system fidelity compounds over rounds") {
  auto s = aav(0.1, aav_packet(6 * 2 * std::numbers::pi / 0.05, 0.0));
  auto profile = CouplingProfile::rectangular(200.0);
  const double p = run_protective(s, profile, {1, 0}).orthogonal_probability;
  const double bound = 1.0 - std::pow(1.0 - p, 10);
  double loss = 0.0;
  const int seeds = 8;
  for (int seed = 1; seed <= seeds; ++seed) {
    auto r = repeated_measurement_series(s, profile, {1, 0}, {10, static_cast<std::uint64_t>(seed), 4, true});
    loss += 1.0 - r.system_fidelity[9];
  }
  loss /= seeds;
  CHECK(loss > 0.5 * bound);
  CHECK(loss < 2.0 * bound);
}

TEST_CASE("physics preconditions") {
  models::OscillatorParams small;
  small.fock_dim = 4;
  auto s = models::build_degenerate_oscillators(small, small, 1);
  CHECK_THROWS_AS(run_protective(s, CouplingProfile::rectangular(20.0), {1, 0}), PhysicsError);

  models::CustomRecipe c;
  c.apparatus = qcore::HilbertFactor::fock(models::kApparatus, 2);
  c.system = qcore::HilbertFactor::spin(models::kSystem);
  c.h_apparatus = qcore::Matrix::Zero(2, 2);
  c.q_apparatus = qcore::Matrix::Identity(2, 2);
  c.pointer = qcore::Matrix::Identity(2, 2);
  c.h_system = qcore::Matrix::Zero(2, 2);
  c.h_system(0, 0) = 1.0;
  c.h_system(1, 1) = -1.0;
  c.q_system = c.h_system;
  c.initial_apparatus = Eigen::VectorXcd::Unit(2, 0);
  c.initial_system = Eigen::VectorXcd::Ones(2) / std::sqrt(2.0);
  CHECK_THROWS_AS(run_protective(models::build_custom(c), CouplingProfile::rectangular(5.0), {1, 0}),
                  PhysicsError);
  c.tags = {"non-eigenstate-demo"};
  CHECK_NOTHROW(run_protective(models::build_custom(c), CouplingProfile::rectangular(5.0), {1, 0}));
}

TEST_CASE("trajectory rows") {
  auto s = aav();
  auto traj = evolve::propagate(s, CouplingProfile::smooth_ramp(40.0, 0.1), {80, 20});
  auto rows = trajectory_rows(s, traj);
  REQUIRE(rows.size() == 5);
  CHECK(rows.front().system_fidelity == doctest::Approx(1.0));
  for (const auto& row : rows) CHECK(std::abs(row.norm - 1.0) < 1e-10);
  CHECK(rows.back().pointer_mean - rows.front().pointer_mean == doctest::Approx(0.05).epsilon(0.1));
}
