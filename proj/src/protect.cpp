#include "protectsim/protect.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <boost/random/discrete_distribution.hpp>

#include "protectsim/errors.hpp"
#include "protectsim/simd/kernels.hpp"

namespace protectsim::protect {

using evolve::BlockPropagator;
using evolve::CouplingProfile;
using evolve::EvolutionSettings;
using models::Scenario;
using qcore::cplx;
using qcore::DensityMatrix;
using qcore::Matrix;
using qcore::QuantumState;
using qcore::Vector;

namespace {

struct Moments {
  double mean = 0.0;
  double width = 0.0;
};

Moments moments(const DensityMatrix& rho, const qcore::HermitianOperator& op) {
  const Matrix& a = op.matrix();
  const double m1 = rho.expectation(op);
  const Matrix ar = a * rho.matrix();
  const double m2 = ar.cwiseProduct(a.transpose()).sum().real();
  return {m1, std::sqrt(std::max(0.0, m2 - m1 * m1))};
}

// Custom scenarios define their own finite spaces; only ladder-built factors
// are truncations of something larger.
double top_levels_population(const Scenario& s, const DensityMatrix& rho_a, const DensityMatrix& rho_s) {
  double worst = 0.0;
  if (std::holds_alternative<models::CustomRecipe>(s.recipe)) return worst;
  auto check = [&](const qcore::HilbertFactor& f, const DensityMatrix& rho) {
    if (f.kind != qcore::BasisKind::fock || f.dim < 2) return;
    const auto d = static_cast<Eigen::Index>(f.dim);
    worst = std::max(worst, rho.matrix()(d - 1, d - 1).real() + rho.matrix()(d - 2, d - 2).real());
  };
  check(s.space.factors()[0], rho_a);
  check(s.space.factors()[1], rho_s);
  return worst;
}

bool eigenstate_exempt(const Scenario& s) { return s.has_tag("degenerate") || s.has_tag("non-eigenstate-demo"); }

}  // namespace

ProtectiveRunResult run_protective(const BlockPropagator& prop, const Scenario& s, const CouplingProfile& profile,
                                   const EvolutionSettings& settings, const ToleranceConfig& tol) {
  if (!eigenstate_exempt(s)) models::validate(s, tol);
  const evolve::Trajectory traj = evolve::propagate(prop, s, profile, settings, tol);

  ProtectiveRunResult r;
  r.T = profile.duration();
  r.slices = settings.slices;
  r.predicted_shift = s.predicted_shift;
  r.warnings = traj.warnings;
  r.final_state = traj.final_state();

  const DensityMatrix rho_a0 = qcore::partial_trace(s.initial, s.apparatus_label());
  r.rho_apparatus = qcore::partial_trace(r.final_state, s.apparatus_label());
  r.rho_system = qcore::partial_trace(r.final_state, s.system_label());
  r.rho_system.validate(tol);
  r.rho_apparatus.validate(tol);

  const Moments p0 = moments(rho_a0, s.pointer), p1 = moments(r.rho_apparatus, s.pointer);
  const Moments q0 = moments(rho_a0, s.q_apparatus), q1 = moments(r.rho_apparatus, s.q_apparatus);
  r.pointer_mean_before = p0.mean;
  r.pointer_mean_after = p1.mean;
  r.pointer_shift = p1.mean - p0.mean;
  r.pointer_width_before = p0.width;
  r.pointer_width_after = p1.width;
  r.apparatus_width_before = q0.width;
  r.apparatus_width_after = q1.width;

  const double fid = r.rho_system.population(s.initial_system.amplitudes());
  if (fid < -tol.density_negativity || fid > 1.0 + tol.density_trace) {
    throw NumericError("system fidelity " + std::to_string(fid) + " outside [0, 1]");
  }
  r.system_fidelity = std::clamp(fid, 0.0, 1.0);
  r.orthogonal_probability = 1.0 - r.system_fidelity;

  r.truncation_population = top_levels_population(s, r.rho_apparatus, r.rho_system);
  if (r.truncation_population > tol.truncation_population) {
    std::ostringstream os;
    os << "Fock truncation populated: top-two-level population " << r.truncation_population << " exceeds "
       << tol.truncation_population << "; increase fock_dim";
    throw PhysicsError(os.str());
  }
  return r;
}

ProtectiveRunResult run_protective(const Scenario& s, const CouplingProfile& profile,
                                   const EvolutionSettings& settings, const ToleranceConfig& tol) {
  return run_protective(BlockPropagator(s), s, profile, settings, tol);
}

// --- scans ------------------------------------------------------------------

CouplingProfile ScanSettings::profile(double T) const {
  if (kind == evolve::ProfileKind::rectangular) return CouplingProfile::rectangular(T);
  return CouplingProfile::smooth_ramp(T, ramp_fraction, shape);
}

std::size_t ScanSettings::slices(double T) const {
  if (!(slices_per_time > 0.0)) throw ConfigError("slices_per_time must be > 0");
  const auto n = static_cast<std::size_t>(std::ceil(slices_per_time * T));
  return std::max({n, min_slices, std::size_t{1}});
}

ScanResult scan_T(const Scenario& s, const std::vector<double>& Ts, const ScanSettings& settings,
                  const ToleranceConfig& tol) {
  if (Ts.size() < 4) {
    throw ConfigError("need >= 4 T values (got " + std::to_string(Ts.size()) + ")");
  }
  for (std::size_t i = 0; i < Ts.size(); ++i) {
    if (!(Ts[i] > 0.0)) throw ConfigError("T values must be > 0");
    if (i > 0 && !(Ts[i] > Ts[i - 1])) throw ConfigError("T values must be strictly increasing");
  }
  if (Ts.back() < 10.0 * Ts.front()) throw ConfigError("T values must span at least one decade");

  const BlockPropagator prop(s);
  ScanResult out;
  out.Ts = Ts;
  out.runs = stats::parallel_map<ProtectiveRunResult>(Ts.size(), [&](std::size_t i) {
    const double T = Ts[i];
    return run_protective(prop, s, settings.profile(T), {settings.slices(T), 0}, tol);
  });

  std::vector<double> p, err;
  for (const auto& r : out.runs) {
    p.push_back(r.orthogonal_probability);
    if (r.predicted_shift) err.push_back(std::abs(r.pointer_shift - *r.predicted_shift));
  }
  auto positive = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
  };
  if (positive(p)) out.orthogonal_fit = stats::fit_power_law(Ts, p);
  if (err.size() == Ts.size() && positive(err)) out.shift_error_fit = stats::fit_power_law(Ts, err);
  return out;
}

// --- spreading --------------------------------------------------------------

SpreadingReport spreading_report(const Scenario& s, double T, const ToleranceConfig& tol) {
  if (!s.spreading) throw ConfigError("spreading_report needs a momentum-coupled scenario");
  if (!(T >= 0.0)) throw ConfigError("spreading_report: T must be >= 0");
  SpreadingReport rep;
  rep.T = T;
  rep.predicted_width2 = s.spreading->predicted_width2(T);
  if (T == 0.0) {
    const Moments m = moments(qcore::partial_trace(s.initial, s.apparatus_label()), s.pointer);
    rep.measured_width2 = m.width * m.width;
  } else {
    const ProtectiveRunResult r = run_protective(s, CouplingProfile::rectangular(T), {1, 0}, tol);
    rep.measured_width2 = r.pointer_width_after * r.pointer_width_after;
  }
  rep.relative_error = std::abs(rep.measured_width2 - rep.predicted_width2) / rep.predicted_width2;
  return rep;
}

// --- repeated readout -------------------------------------------------------

namespace {

// Pointer eigenbasis as columns, ascending eigenvalues.
struct PointerBasis {
  Matrix vectors;
  qcore::RealVector values;
  bool translatable = false;
};

PointerBasis pointer_basis(const Scenario& s) {
  const qcore::HilbertFactor& f = s.space.factors()[0];
  PointerBasis b;
  if (s.pointer_on_conjugate_grid && f.grid) {
    const Matrix F = models::dft_matrix(f.dim, f.grid->extent);
    if (f.kind == qcore::BasisKind::grid_position) {
      b.vectors = F.adjoint();
      b.values = models::grid_momenta(f.dim, f.grid->extent);
    } else {
      b.vectors = F;
      b.values = models::grid_positions(f.dim, f.grid->extent);
    }
    b.translatable = true;
    return b;
  }
  qcore::Eigensystem e = qcore::eigensystem(s.pointer);
  b.vectors = std::move(e.vectors);
  b.values = std::move(e.values);
  return b;
}

}  // namespace

SeriesResult repeated_measurement_series(const Scenario& s, const CouplingProfile& profile,
                                         const EvolutionSettings& settings, const SeriesSettings& series) {
  if (series.shots < 1) throw ConfigError("shots must be >= 1");
  if (series.bin_cells < 1) throw ConfigError("bin_cells must be >= 1");
  const evolve::CompiledPropagator round = BlockPropagator(s).compile(profile, settings.slices);
  const PointerBasis basis = pointer_basis(s);
  const auto da = static_cast<Eigen::Index>(s.space.factors()[0].dim);
  const auto ds = static_cast<Eigen::Index>(s.space.factors()[1].dim);
  const auto cells = static_cast<Eigen::Index>(series.bin_cells);
  const Eigen::Index bins = (da + cells - 1) / cells;
  const Eigen::Index ref_bin = (da / 2) / cells;
  const bool shift_back = series.recenter && basis.translatable;

  std::vector<double> centre(static_cast<std::size_t>(bins));
  for (Eigen::Index b = 0; b < bins; ++b) {
    const Eigen::Index lo = b * cells, hi = std::min(da, lo + cells);
    centre[static_cast<std::size_t>(b)] = basis.values.segment(lo, hi - lo).mean();
  }

  SeriesResult out;
  out.seed = series.seed;
  out.bin_width = basis.values.size() > 1 ? (basis.values(da - 1) - basis.values(0)) / double(da - 1) * double(cells)
                                          : 0.0;
  std::mt19937_64 rng(series.seed);
  double offset = 0.0;
  QuantumState psi = s.initial;

  // Samples a pointer bin, collapses psi onto it, optionally recentres, and
  // returns the reading.
  auto measure = [&]() {
    // Composite amplitudes as a (da x ds) matrix, row = apparatus index.
    Eigen::Map<Matrix> amp(psi.amplitudes().data(), ds, da);  // column-major: amp(s, a)
    Matrix c = (basis.vectors.adjoint() * amp.transpose());    // (da x ds) in pointer basis
    std::vector<double> w(static_cast<std::size_t>(bins), 0.0);
    for (Eigen::Index m = 0; m < da; ++m) w[static_cast<std::size_t>(m / cells)] += c.row(m).squaredNorm();
    boost::random::discrete_distribution<std::size_t, double> pick(w.begin(), w.end());
    const auto b = static_cast<Eigen::Index>(pick(rng));
    const double reading = centre[static_cast<std::size_t>(b)] + offset;
    const Eigen::Index lo = b * cells, hi = std::min(da, lo + cells);
    Matrix kept = Matrix::Zero(da, ds);
    kept.middleRows(lo, hi - lo) = c.middleRows(lo, hi - lo);
    if (shift_back && b != ref_bin) {
      const Eigen::Index shift = (b - ref_bin) * cells;
      Matrix moved(da, ds);
      for (Eigen::Index m = 0; m < da; ++m) moved.row(((m - shift) % da + da) % da) = kept.row(m);
      kept = std::move(moved);
      offset += centre[static_cast<std::size_t>(b)] - centre[static_cast<std::size_t>(ref_bin)];
    }
    const Matrix back = basis.vectors * kept;  // (da x ds)
    amp = back.transpose();
    psi = psi.normalized();
    return reading;
  };

  out.readings.push_back(measure());
  for (std::size_t k = 0; k < series.shots; ++k) {
    round.apply(std::span<cplx>(psi.amplitudes().data(), psi.dim()));
    out.readings.push_back(measure());
    const double d = out.readings.back() - out.readings[out.readings.size() - 2];
    out.differences.push_back(d);
    const double prev = out.running_mean.empty() ? 0.0 : out.running_mean.back();
    out.running_mean.push_back(prev + (d - prev) / static_cast<double>(out.differences.size()));
    const DensityMatrix rho_s = qcore::partial_trace(psi, s.system_label());
    out.system_fidelity.push_back(std::clamp(rho_s.population(s.initial_system.amplitudes()), 0.0, 1.0));
  }
  return out;
}

std::vector<TrajectoryRow> trajectory_rows(const Scenario& s, const evolve::Trajectory& traj) {
  std::vector<TrajectoryRow> rows;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const QuantumState& st = traj.states[i];
    const DensityMatrix rho_a = qcore::partial_trace(st, s.apparatus_label());
    const DensityMatrix rho_s = qcore::partial_trace(st, s.system_label());
    rows.push_back({traj.times[i], rho_a.expectation(s.pointer), rho_s.population(s.initial_system.amplitudes()),
                    st.norm()});
  }
  return rows;
}

}  // namespace protectsim::protect
