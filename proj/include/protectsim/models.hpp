#pragma once

// Builders for the system/apparatus scenarios studied by the simulator.
//
// Every scenario is a two-factor space, apparatus first and system second,
// with H = H_A + H_S + g(t) Q_A Q_S. The pointer is the apparatus observable
// conjugate to the variable that couples to the system; `pointer_sign`
// records how the pointer moves for the exp(-iHt) convention:
//     predicted shift = pointer_sign * <nu|Q_S|nu>.

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "protectsim/qcore.hpp"

namespace protectsim::models {

using qcore::HermitianOperator;
using qcore::QuantumState;
using Vec3 = std::array<double, 3>;

inline constexpr const char* kApparatus = "apparatus";
inline constexpr const char* kSystem = "system";

struct OscillatorParams {
  double mass = 1.0;
  double omega = 1.0;
  std::size_t fock_dim = 24;
  void validate() const;
};

struct SpinFieldParams {
  double mu = 1.0;
  double b0 = 1.0;
  Vec3 field_dir{0.0, 0.0, 1.0};  // direction of the static field
  double bi = 0.1;
  Vec3 coupling_dir{0.0, 0.0, 1.0};  // direction of the coupling field
  void validate() const;

  // field_dir = z, coupling_dir tilted by `theta` towards x.
  static SpinFieldParams with_angle(double mu, double b0, double bi, double theta);
};

struct PacketParams {
  double width = 1.0;     // epsilon
  double center = 0.0;    // x0
  double momentum = 0.0;  // p0
  double extent = 20.0;   // grid box L
  std::size_t points = 256;
  void validate() const;
};

// --- grids ------------------------------------------------------------------

// x_j = -L/2 + j L / n
qcore::RealVector grid_positions(std::size_t points, double extent);
// k_m = (m - n/2) 2 pi / L, ascending
qcore::RealVector grid_momenta(std::size_t points, double extent);
// Unitary kernel F_{mj} = exp(-i k_m x_j) / sqrt(n): position -> momentum amplitudes.
qcore::Matrix dft_matrix(std::size_t points, double extent);

// Position / momentum operators on a grid factor, in that factor's own basis.
HermitianOperator grid_position_operator(const qcore::HilbertFactor& factor);
HermitianOperator grid_momentum_operator(const qcore::HilbertFactor& factor);

// Discretized normalized Gaussian exp(-(x-x0)^2/2eps^2 + i p0 x) in the
// position basis of a grid_position factor. PhysicsError on boundary leakage.
QuantumState build_grid_packet(const PacketParams& p, const std::string& label = kApparatus);
// Basis change between grid_position and grid_momentum factors of equal size.
QuantumState to_momentum_basis(const QuantumState& position_state);
QuantumState to_position_basis(const QuantumState& momentum_state);

// --- oscillators ------------------------------------------------------------

struct FockOps {
  HermitianOperator hamiltonian;  // omega (n + 1/2), exactly diagonal
  HermitianOperator position;     // sqrt(1/2 M omega) (a + a^dag)
  HermitianOperator momentum;     // i sqrt(M omega / 2) (a^dag - a)
  HermitianOperator number;
};

FockOps build_fock_ops(const OscillatorParams& p, const std::string& label = kApparatus);
QuantumState fock_state(const qcore::HilbertFactor& factor, std::size_t n);

// --- scenarios --------------------------------------------------------------

struct AavRecipe {
  SpinFieldParams field;
  PacketParams packet;
};

struct MomentumCoupledRecipe {
  SpinFieldParams field;
  PacketParams packet;
  double mass = 1.0;
  bool system_up = true;  // system starts in the +1 eigenstate of sigma . field_dir
};

struct DegenerateOscillatorsRecipe {
  OscillatorParams apparatus;
  OscillatorParams system;
  std::size_t excitation = 1;
};

struct DegenerateSpinOscillatorRecipe {
  OscillatorParams apparatus;
  double mu_b0 = 0.5;
  Vec3 coupling_dir{1.0, 0.0, 0.0};
};

// Scenario supplied as raw matrices.
struct CustomRecipe {
  qcore::HilbertFactor apparatus;
  qcore::HilbertFactor system;
  qcore::Matrix h_apparatus, q_apparatus, pointer;
  qcore::Matrix h_system, q_system;
  qcore::Vector initial_apparatus, initial_system;
  double pointer_sign = 1.0;
  std::optional<double> predicted_shift;
  std::vector<std::string> tags;
};

using ScenarioRecipe = std::variant<AavRecipe, MomentumCoupledRecipe, DegenerateOscillatorsRecipe,
                                    DegenerateSpinOscillatorRecipe, CustomRecipe>;

// Gaussian spreading of a free packet of width eps and mass M.
struct SpreadingLaw {
  double width = 1.0;
  double mass = 1.0;
  // eps(T)^2 = (eps^2 + T^2 / (M^2 eps^2)) / 2, the position variance at time T.
  double predicted_width2(double T) const;
};

struct Scenario {
  std::string name;
  qcore::CompositeSpace space;
  HermitianOperator h_apparatus, h_system;  // factor-level
  HermitianOperator q_apparatus, q_system;  // factor-level
  HermitianOperator pointer;                // factor-level, apparatus
  QuantumState initial_apparatus, initial_system;
  QuantumState initial;                     // product on `space`
  double pointer_sign = 1.0;
  // Pointer eigenbasis is the uniform conjugate grid (translations are exact).
  bool pointer_on_conjugate_grid = false;
  std::optional<double> predicted_shift;
  // Closed-form final composite state (amplitude magnitudes only).
  std::optional<QuantumState> predicted_final;
  std::optional<SpreadingLaw> spreading;
  std::vector<std::string> tags;
  ScenarioRecipe recipe;

  bool has_tag(const std::string& tag) const;
  const std::string& apparatus_label() const { return space.factors()[0].label; }
  const std::string& system_label() const { return space.factors()[1].label; }

  HermitianOperator h0() const;        // H_A + H_S on the composite
  HermitianOperator coupling() const;  // Q_A (x) Q_S
  HermitianOperator pointer_full() const;
};

Scenario build_aav_spin(const SpinFieldParams& p, const PacketParams& packet);
Scenario build_momentum_coupled(const SpinFieldParams& p, const PacketParams& packet, double mass,
                                bool system_up = true);
Scenario build_degenerate_oscillators(const OscillatorParams& apparatus, const OscillatorParams& system,
                                      std::size_t excitation = 1);
Scenario build_degenerate_spin_oscillator(const OscillatorParams& p, double mu_b0, const Vec3& n);
Scenario build_custom(const CustomRecipe& r);
Scenario build(const ScenarioRecipe& recipe);

// Checks the Scenario invariants: product initial state, system eigenstate
// (unless tagged "non-eigenstate-demo"), shared spaces.
void validate(const Scenario& s, const ToleranceConfig& tol = default_tolerances());

struct PerturbativePrediction {
  double shift = 0.0;              // pointer_sign * <nu|Q_S|nu>
  double system_expectation = 0.0; // <nu|Q_S|nu>
  // c with (first-order orthogonal admixture norm)^2 = c^2 / T^2.
  double correction_coefficient = 0.0;
  double nu_energy = 0.0;
  double gap_tolerance = 0.0;
};

// First-order prediction. DegeneracyError when an unperturbed gap below the
// tolerance carries a coupling matrix element above tol.matrix_element.
PerturbativePrediction perturbative_prediction(const Scenario& s,
                                               const ToleranceConfig& tol = default_tolerances());

}  // namespace protectsim::models
