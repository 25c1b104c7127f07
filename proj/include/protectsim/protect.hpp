#pragma once

// End-to-end protective-measurement runs, T-scaling studies, the spreading
// check for momentum-coupled pointers, and sampled repeated readouts.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "protectsim/evolve.hpp"
#include "protectsim/models.hpp"
#include "protectsim/stats.hpp"

namespace protectsim::protect {

struct ProtectiveRunResult {
  double T = 0.0;
  std::size_t slices = 0;
  double pointer_mean_before = 0.0;
  double pointer_mean_after = 0.0;
  double pointer_shift = 0.0;
  double pointer_width_before = 0.0;
  double pointer_width_after = 0.0;
  // Std-dev of Q_A, the variable conjugate to the pointer.
  double apparatus_width_before = 0.0;
  double apparatus_width_after = 0.0;
  double system_fidelity = 0.0;
  double orthogonal_probability = 0.0;
  std::optional<double> predicted_shift;
  // Largest population of the top two levels of any Fock factor (0 if none).
  double truncation_population = 0.0;
  std::vector<std::string> warnings;
  qcore::DensityMatrix rho_system;
  qcore::DensityMatrix rho_apparatus;
  qcore::QuantumState final_state;
};

// Propagates, reads the pointer from the reduced apparatus state and the
// fidelity from the reduced system state. PhysicsError when the scenario is
// invalid or a Fock truncation is populated above tol.truncation_population.
ProtectiveRunResult run_protective(const models::Scenario& s, const evolve::CouplingProfile& profile,
                                   const evolve::EvolutionSettings& settings,
                                   const ToleranceConfig& tol = default_tolerances());
ProtectiveRunResult run_protective(const evolve::BlockPropagator& prop, const models::Scenario& s,
                                   const evolve::CouplingProfile& profile, const evolve::EvolutionSettings& settings,
                                   const ToleranceConfig& tol = default_tolerances());

// Per-T profile and slice rule for a scan.
struct ScanSettings {
  evolve::ProfileKind kind = evolve::ProfileKind::rectangular;
  double ramp_fraction = 0.1;
  evolve::RampShape shape = evolve::RampShape::sine_squared;
  // N = max(min_slices, ceil(slices_per_time * T)).
  double slices_per_time = 1.0;
  std::size_t min_slices = 1;

  evolve::CouplingProfile profile(double T) const;
  std::size_t slices(double T) const;
};

struct ScanResult {
  std::vector<double> Ts;
  std::vector<ProtectiveRunResult> runs;
  // Absent when some orthogonal probability is not positive.
  std::optional<stats::PowerLawFit> orthogonal_fit;
  // |shift - predicted| vs T; absent without a prediction or with a zero error.
  std::optional<stats::PowerLawFit> shift_error_fit;
};

// ConfigError("need >= 4 T values ...") unless there are at least four strictly
// increasing Ts spanning a decade. Runs are independent and run in parallel.
ScanResult scan_T(const models::Scenario& s, const std::vector<double>& Ts, const ScanSettings& settings,
                  const ToleranceConfig& tol = default_tolerances());

struct SpreadingReport {
  double T = 0.0;
  double measured_width2 = 0.0;
  double predicted_width2 = 0.0;
  double relative_error = 0.0;
};

// Pointer (position) variance of the reduced apparatus state after a
// rectangular run of length T, against the free-spreading law. T = 0 reports
// the initial packet.
SpreadingReport spreading_report(const models::Scenario& s, double T,
                                 const ToleranceConfig& tol = default_tolerances());

struct SeriesSettings {
  std::size_t shots = 1;
  std::uint64_t seed = 0;
  std::size_t bin_cells = 4;
  // Cyclically translate the collapsed pointer back to the grid centre after
  // each reading (conjugate-grid scenarios only) and carry the offset.
  bool recenter = true;
};

struct SeriesResult {
  std::uint64_t seed = 0;
  double bin_width = 0.0;
  std::vector<double> readings;          // r_0 (before coupling), r_1 .. r_shots
  std::vector<double> differences;       // r_i - r_{i-1}
  std::vector<double> running_mean;      // mean of differences[0..i]
  std::vector<double> system_fidelity;   // <nu|rho_S|nu> after each round
};

SeriesResult repeated_measurement_series(const models::Scenario& s, const evolve::CouplingProfile& profile,
                                         const evolve::EvolutionSettings& settings, const SeriesSettings& series);

struct TrajectoryRow {
  double time = 0.0;
  double pointer_mean = 0.0;
  double system_fidelity = 0.0;
  double norm = 0.0;
};

std::vector<TrajectoryRow> trajectory_rows(const models::Scenario& s, const evolve::Trajectory& traj);

}  // namespace protectsim::protect
