#pragma once

// Coupling schedules g(t) and time-sliced propagation of
//     H(t) = H_A + H_S + g(t) Q_A Q_S.
//
// The slice product applies exp(-i H(t_m) dT) with g evaluated at slice
// midpoints. Consecutive slices with identical g commute and are fused into a
// single exponential, so rectangular runs cost one spectral step regardless of
// the slice count.

#include <cstddef>
#include <string>
#include <vector>

#include "protectsim/models.hpp"
#include "protectsim/qcore.hpp"

namespace protectsim::evolve {

using qcore::QuantumState;

enum class ProfileKind { rectangular, smooth_ramp };
enum class RampShape { sine_squared, linear };

std::string to_string(ProfileKind k);
std::string to_string(RampShape s);
ProfileKind profile_kind_from_string(const std::string& s);
RampShape ramp_shape_from_string(const std::string& s);

class CouplingProfile {
 public:
  static CouplingProfile rectangular(double duration);
  // ramp_fraction in [0, 0.5): switch-on over [0, f T] and switch-off over
  // [T - f T, T]; the plateau height is set so that the integral is 1.
  static CouplingProfile smooth_ramp(double duration, double ramp_fraction,
                                     RampShape shape = RampShape::sine_squared);

  ProfileKind kind() const { return kind_; }
  RampShape shape() const { return shape_; }
  double duration() const { return duration_; }
  double ramp_fraction() const { return ramp_fraction_; }
  double plateau() const { return plateau_; }

  // ConfigError outside [0, T].
  double g_at(double t) const;
  // Piecewise composite Simpson over the ramp and plateau pieces.
  double integral(std::size_t panels_per_piece = 2000) const;

 private:
  CouplingProfile(ProfileKind kind, double duration, double ramp_fraction, RampShape shape);
  ProfileKind kind_;
  double duration_;
  double ramp_fraction_;
  RampShape shape_;
  double plateau_;
};

inline double g_at(const CouplingProfile& p, double t) { return p.g_at(t); }

struct EvolutionSettings {
  std::size_t slices = 1;
  std::size_t record_stride = 0;  // snapshot every k slices; 0 = endpoints only
};

struct Trajectory {
  std::vector<double> times;
  std::vector<QuantumState> states;
  CouplingProfile profile;
  std::vector<std::string> warnings;

  const QuantumState& final_state() const { return states.back(); }
};

enum class Direction { forward, backward };
class CompiledPropagator;

// Spectral stepper for H0 + g V split into the connected components of the
// combined sparsity pattern. Immutable after construction.
class BlockPropagator {
 public:
  BlockPropagator(const qcore::Matrix& h0, const qcore::Matrix& coupling);
  explicit BlockPropagator(const models::Scenario& s);

  std::size_t dim() const { return dim_; }
  std::size_t block_count() const { return blocks_.size(); }
  std::size_t largest_block() const;

  // psi <- exp(-i (H0 + g V) dt) psi
  void step(double g, double dt, std::span<qcore::cplx> psi) const;
  // Cheap upper bound on ||H0 + g V|| (max absolute row sum).
  double norm_bound(double g) const;
  CompiledPropagator compile(const CouplingProfile& profile, std::size_t slices,
                             Direction dir = Direction::forward) const;

 private:
  struct Block {
    std::vector<std::size_t> index;
    qcore::Matrix h0;
    qcore::Matrix v;
  };
  std::size_t dim_ = 0;
  std::vector<Block> blocks_;
  qcore::Matrix h0_, v_;
};

// The whole slice product for one (profile, N) as per-block unitaries; cheap to
// reapply many times.
class CompiledPropagator {
 public:
  std::size_t dim() const { return dim_; }
  void apply(std::span<qcore::cplx> psi) const;

 private:
  friend class BlockPropagator;
  std::size_t dim_ = 0;
  std::vector<std::vector<std::size_t>> index_;
  std::vector<qcore::Matrix> unitary_;
};

// Applies the slice product to `start`. Backward applies the adjoint slices in
// reverse order (exact inverse of the forward map).
QuantumState propagate_state(const BlockPropagator& prop, const CouplingProfile& profile,
                             const EvolutionSettings& settings, const QuantumState& start,
                             Direction dir = Direction::forward);

Trajectory propagate(const models::Scenario& s, const CouplingProfile& profile, const EvolutionSettings& settings,
                     const ToleranceConfig& tol = default_tolerances());
Trajectory propagate(const BlockPropagator& prop, const models::Scenario& s, const CouplingProfile& profile,
                     const EvolutionSettings& settings, const ToleranceConfig& tol = default_tolerances());

// ceil(10 T ||H||) with the row-sum bound at the profile's peak coupling.
std::size_t recommended_slices(const BlockPropagator& prop, const CouplingProfile& profile);

// || final(N) - final(2N) ||
double convergence_check(const models::Scenario& s, const CouplingProfile& profile, std::size_t slices);

}  // namespace protectsim::evolve
