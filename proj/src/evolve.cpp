#include "protectsim/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "protectsim/errors.hpp"
#include "protectsim/simd/kernels.hpp"

namespace protectsim::evolve {

using qcore::cplx;
using qcore::Matrix;

std::string to_string(ProfileKind k) { return k == ProfileKind::rectangular ? "rectangular" : "smooth_ramp"; }
std::string to_string(RampShape s) { return s == RampShape::sine_squared ? "sine_squared" : "linear"; }

ProfileKind profile_kind_from_string(const std::string& s) {
  if (s == "rectangular" || s == "rect") return ProfileKind::rectangular;
  if (s == "smooth_ramp" || s == "ramp") return ProfileKind::smooth_ramp;
  throw ConfigError("unknown profile kind '" + s + "'");
}

RampShape ramp_shape_from_string(const std::string& s) {
  if (s == "sine_squared" || s == "sine2") return RampShape::sine_squared;
  if (s == "linear") return RampShape::linear;
  throw ConfigError("unknown ramp shape '" + s + "'");
}

// --- profiles ---------------------------------------------------------------

CouplingProfile::CouplingProfile(ProfileKind kind, double duration, double ramp_fraction, RampShape shape)
    : kind_(kind), duration_(duration), ramp_fraction_(ramp_fraction), shape_(shape), plateau_(0.0) {
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("profile duration T must be > 0");
  if (!(ramp_fraction >= 0.0 && ramp_fraction < 0.5)) throw ConfigError("ramp_fraction must lie in [0, 0.5)");
  // Both ramp shapes integrate to plateau * ramp / 2 per end.
  plateau_ = 1.0 / (duration * (1.0 - ramp_fraction));
  const double total = integral();
  if (std::abs(total - 1.0) > 1e-10) {
    throw NumericError("coupling profile integral " + std::to_string(total) + " != 1");
  }
}

CouplingProfile CouplingProfile::rectangular(double duration) {
  return CouplingProfile(ProfileKind::rectangular, duration, 0.0, RampShape::sine_squared);
}

CouplingProfile CouplingProfile::smooth_ramp(double duration, double ramp_fraction, RampShape shape) {
  return CouplingProfile(ProfileKind::smooth_ramp, duration, ramp_fraction, shape);
}

double CouplingProfile::g_at(double t) const {
  if (!(t >= 0.0 && t <= duration_)) {
    std::ostringstream os;
    os << "g(t) requested at t = " << t << " outside [0, " << duration_ << "]";
    throw ConfigError(os.str());
  }
  if (kind_ == ProfileKind::rectangular || ramp_fraction_ == 0.0) return plateau_;
  const double ramp = ramp_fraction_ * duration_;
  const double edge = std::min(t, duration_ - t);
  if (edge >= ramp) return plateau_;
  const double u = edge / ramp;
  if (shape_ == RampShape::linear) return plateau_ * u;
  const double s = std::sin(0.5 * std::numbers::pi * u);
  return plateau_ * s * s;
}

double CouplingProfile::integral(std::size_t panels) const {
  if (panels % 2) ++panels;
  auto simpson = [&](double a, double b) {
    if (b <= a) return 0.0;
    const double h = (b - a) / static_cast<double>(panels);
    double s = g_at(a) + g_at(b);
    for (std::size_t i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * g_at(a + h * static_cast<double>(i));
    return s * h / 3.0;
  };
  const double ramp = (kind_ == ProfileKind::rectangular) ? 0.0 : ramp_fraction_ * duration_;
  return simpson(0.0, ramp) + simpson(ramp, duration_ - ramp) + simpson(duration_ - ramp, duration_);
}

// --- block propagator -------------------------------------------------------

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

BlockPropagator::BlockPropagator(const Matrix& h0, const Matrix& coupling) : h0_(h0), v_(coupling) {
  if (h0.rows() != h0.cols() || coupling.rows() != h0.rows() || coupling.cols() != h0.cols()) {
    throw ConfigError("propagator: H0 and coupling must be square and of equal size");
  }
  dim_ = static_cast<std::size_t>(h0.rows());
  std::vector<std::size_t> parent(dim_);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (std::size_t j = 0; j < dim_; ++j) {
    for (std::size_t i = 0; i < dim_; ++i) {
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      if (i != j && (h0(ii, jj) != cplx{} || coupling(ii, jj) != cplx{})) {
        const std::size_t a = find_root(parent, i), b = find_root(parent, j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::vector<std::ptrdiff_t> block_of(dim_, -1);
  for (std::size_t i = 0; i < dim_; ++i) {
    const std::size_t r = find_root(parent, i);
    if (block_of[r] < 0) {
      block_of[r] = static_cast<std::ptrdiff_t>(blocks_.size());
      blocks_.push_back({});
    }
    blocks_[static_cast<std::size_t>(block_of[r])].index.push_back(i);
  }
  for (Block& b : blocks_) {
    const auto n = static_cast<Eigen::Index>(b.index.size());
    b.h0.resize(n, n);
    b.v.resize(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        const auto gr = static_cast<Eigen::Index>(b.index[static_cast<std::size_t>(r)]);
        const auto gc = static_cast<Eigen::Index>(b.index[static_cast<std::size_t>(c)]);
        b.h0(r, c) = h0(gr, gc);
        b.v(r, c) = coupling(gr, gc);
      }
    }
  }
}

BlockPropagator::BlockPropagator(const models::Scenario& s)
    : BlockPropagator(s.h0().matrix(), s.coupling().matrix()) {}

std::size_t BlockPropagator::largest_block() const {
  std::size_t m = 0;
  for (const Block& b : blocks_) m = std::max(m, b.index.size());
  return m;
}

double BlockPropagator::norm_bound(double g) const {
  return (h0_ + g * v_).cwiseAbs().rowwise().sum().maxCoeff();
}

void BlockPropagator::step(double g, double dt, std::span<cplx> psi) const {
  if (psi.size() != dim_) throw ConfigError("propagator: state length mismatch");
  if (dt == 0.0) return;
  std::vector<cplx> local, coeff, phase;
  for (const Block& b : blocks_) {
    const std::size_t n = b.index.size();
    if (n == 1) {
      const double e = (b.h0(0, 0) + g * b.v(0, 0)).real();
      psi[b.index[0]] *= std::polar(1.0, -e * dt);
      continue;
    }
    const qcore::Eigensystem eig = qcore::eigensystem(Matrix(b.h0 + g * b.v));
    local.resize(n);
    coeff.resize(n);
    phase.resize(n);
    for (std::size_t i = 0; i < n; ++i) local[i] = psi[b.index[i]];
    const std::span<const cplx> vecs(eig.vectors.data(), n * n);
    simd::matvec_adjoint(vecs, n, n, local, coeff);
    for (std::size_t i = 0; i < n; ++i) phase[i] = std::polar(1.0, -eig.values(static_cast<Eigen::Index>(i)) * dt);
    simd::hadamard(coeff, phase);
    simd::matvec(vecs, n, n, coeff, local);
    for (std::size_t i = 0; i < n; ++i) psi[b.index[i]] = local[i];
  }
}

// --- slice product ----------------------------------------------------------

namespace {

// Runs of consecutive slices sharing the same midpoint coupling.
struct Run {
  std::size_t first;
  std::size_t count;
  double g;
};

std::vector<Run> slice_runs(const CouplingProfile& profile, std::size_t slices, std::size_t stride) {
  const double dt = profile.duration() / static_cast<double>(slices);
  std::vector<Run> runs;
  for (std::size_t m = 0; m < slices; ++m) {
    const double t_mid = std::min((static_cast<double>(m) + 0.5) * dt, profile.duration());
    const double g = profile.g_at(t_mid);
    const bool boundary = stride > 0 && m % stride == 0;
    if (!runs.empty() && !boundary && runs.back().g == g) {
      ++runs.back().count;
    } else {
      runs.push_back({m, 1, g});
    }
  }
  return runs;
}

void check_norm(const QuantumState& psi, double limit, double t) {
  const double drift = std::abs(psi.norm() - 1.0);
  if (drift > limit) {
    std::ostringstream os;
    os << "norm drift " << drift << " at t = " << t << " exceeds " << limit;
    throw NumericError(os.str());
  }
}

}  // namespace

CompiledPropagator BlockPropagator::compile(const CouplingProfile& profile, std::size_t slices, Direction dir) const {
  if (slices < 1) throw ConfigError("slice count must be >= 1");
  const double dt = profile.duration() / static_cast<double>(slices);
  const double sign = dir == Direction::forward ? 1.0 : -1.0;
  std::vector<Run> runs = slice_runs(profile, slices, 0);
  if (dir == Direction::backward) std::reverse(runs.begin(), runs.end());
  CompiledPropagator out;
  out.dim_ = dim_;
  for (const Block& b : blocks_) {
    const auto n = static_cast<Eigen::Index>(b.index.size());
    Matrix u = Matrix::Identity(n, n);
    for (const Run& r : runs) {
      const qcore::Eigensystem eig = qcore::eigensystem(Matrix(b.h0 + r.g * b.v));
      Eigen::VectorXcd phase(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        phase(i) = std::polar(1.0, -sign * eig.values(i) * dt * static_cast<double>(r.count));
      }
      u = (eig.vectors * phase.asDiagonal() * eig.vectors.adjoint() * u).eval();
    }
    out.index_.push_back(b.index);
    out.unitary_.push_back(std::move(u));
  }
  return out;
}

void CompiledPropagator::apply(std::span<cplx> psi) const {
  if (psi.size() != dim_) throw ConfigError("compiled propagator: state length mismatch");
  std::vector<cplx> in, out;
  for (std::size_t k = 0; k < index_.size(); ++k) {
    const std::vector<std::size_t>& idx = index_[k];
    const std::size_t n = idx.size();
    in.resize(n);
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) in[i] = psi[idx[i]];
    simd::matvec(std::span<const cplx>(unitary_[k].data(), n * n), n, n, in, out);
    for (std::size_t i = 0; i < n; ++i) psi[idx[i]] = out[i];
  }
}

QuantumState propagate_state(const BlockPropagator& prop, const CouplingProfile& profile,
                             const EvolutionSettings& settings, const QuantumState& start, Direction dir) {
  if (settings.slices < 1) throw ConfigError("slice count must be >= 1");
  if (start.dim() != prop.dim()) throw ConfigError("propagate: state dimension mismatch");
  const double dt = profile.duration() / static_cast<double>(settings.slices);
  QuantumState psi = start;
  std::span<cplx> amps(psi.amplitudes().data(), psi.dim());
  std::vector<Run> runs = slice_runs(profile, settings.slices, 0);
  if (dir == Direction::forward) {
    for (const Run& r : runs) prop.step(r.g, dt * static_cast<double>(r.count), amps);
  } else {
    for (auto it = runs.rbegin(); it != runs.rend(); ++it) prop.step(it->g, -dt * static_cast<double>(it->count), amps);
  }
  return psi;
}

Trajectory propagate(const BlockPropagator& prop, const models::Scenario& s, const CouplingProfile& profile,
                     const EvolutionSettings& settings, const ToleranceConfig& tol) {
  if (settings.slices < 1) throw ConfigError("slice count must be >= 1");
  if (prop.dim() != s.space.total_dim()) throw ConfigError("propagate: propagator and scenario dimensions differ");
  Trajectory traj{{}, {}, profile, {}};
  const std::size_t recommended = recommended_slices(prop, profile);
  if (settings.slices < recommended) {
    traj.warnings.push_back("slice count " + std::to_string(settings.slices) + " below recommended " +
                            std::to_string(recommended));
  }
  const double dt = profile.duration() / static_cast<double>(settings.slices);
  QuantumState psi = s.initial;
  std::span<cplx> amps(psi.amplitudes().data(), psi.dim());
  traj.times.push_back(0.0);
  traj.states.push_back(psi);

  for (const Run& r : slice_runs(profile, settings.slices, settings.record_stride)) {
    prop.step(r.g, dt * static_cast<double>(r.count), amps);
    const std::size_t done = r.first + r.count;
    const bool snapshot = settings.record_stride > 0 && done % settings.record_stride == 0 && done < settings.slices;
    if (snapshot) {
      const double t = dt * static_cast<double>(done);
      check_norm(psi, tol.norm_blowup, t);
      traj.times.push_back(t);
      traj.states.push_back(psi);
    }
  }
  check_norm(psi, tol.norm_blowup, profile.duration());
  traj.times.push_back(profile.duration());
  traj.states.push_back(std::move(psi));
  return traj;
}

Trajectory propagate(const models::Scenario& s, const CouplingProfile& profile, const EvolutionSettings& settings,
                     const ToleranceConfig& tol) {
  return propagate(BlockPropagator(s), s, profile, settings, tol);
}

std::size_t recommended_slices(const BlockPropagator& prop, const CouplingProfile& profile) {
  const double bound = prop.norm_bound(profile.plateau());
  return static_cast<std::size_t>(std::ceil(10.0 * profile.duration() * bound));
}

double convergence_check(const models::Scenario& s, const CouplingProfile& profile, std::size_t slices) {
  if (slices < 2) throw ConfigError("convergence_check needs N >= 2");
  const BlockPropagator prop(s);
  const QuantumState a = propagate_state(prop, profile, {slices, 0}, s.initial);
  const QuantumState b = propagate_state(prop, profile, {2 * slices, 0}, s.initial);
  return (a.amplitudes() - b.amplitudes()).norm();
}

}  // namespace protectsim::evolve
