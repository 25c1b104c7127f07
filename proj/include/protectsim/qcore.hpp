#pragma once

// Dense complex linear algebra over labeled tensor-product spaces.
//
// Conventions: hbar = 1, propagators are exp(-i H t), and composite bases are
// ordered with the first factor most significant (apparatus first, system
// second), so amplitude index = a * dim(system) + s for two factors.

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "protectsim/tolerance.hpp"

namespace protectsim::qcore {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr std::size_t kMaxTotalDim = 4096;

enum class BasisKind { fock, grid_position, grid_momentum, spin };

std::string to_string(BasisKind kind);
BasisKind basis_kind_from_string(const std::string& s);

struct GridSpec {
  double extent = 0.0;     // box length L
  std::size_t points = 0;  // equals the factor dimension
  bool operator==(const GridSpec&) const = default;
};

struct HilbertFactor {
  std::string label;
  std::size_t dim = 0;
  BasisKind kind = BasisKind::fock;
  std::optional<GridSpec> grid;

  static HilbertFactor fock(std::string label, std::size_t dim);
  static HilbertFactor spin(std::string label);
  static HilbertFactor grid_position(std::string label, double extent, std::size_t points);
  static HilbertFactor grid_momentum(std::string label, double extent, std::size_t points);

  void validate() const;
  bool operator==(const HilbertFactor&) const = default;
};

class CompositeSpace {
 public:
  CompositeSpace() = default;
  explicit CompositeSpace(std::vector<HilbertFactor> factors);
  static CompositeSpace single(HilbertFactor factor);

  const std::vector<HilbertFactor>& factors() const { return factors_; }
  std::size_t total_dim() const { return total_dim_; }
  std::size_t factor_count() const { return factors_.size(); }
  // Throws ConfigError for an unknown label.
  std::size_t index_of(const std::string& label) const;
  const HilbertFactor& factor(const std::string& label) const;

  bool operator==(const CompositeSpace& other) const { return factors_ == other.factors_; }

 private:
  std::vector<HilbertFactor> factors_;
  std::size_t total_dim_ = 0;
};

class QuantumState {
 public:
  QuantumState() = default;
  QuantumState(CompositeSpace space, Vector amplitudes);

  const CompositeSpace& space() const { return space_; }
  const Vector& amplitudes() const { return amps_; }
  Vector& amplitudes() { return amps_; }
  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }

  double norm() const;
  QuantumState normalized() const;
  // <this|other>
  cplx overlap(const QuantumState& other) const;

 private:
  CompositeSpace space_;
  Vector amps_;
};

// |a> (x) |b> with a's factors first.
QuantumState tensor(const QuantumState& a, const QuantumState& b);

class HermitianOperator {
 public:
  HermitianOperator() = default;
  // Validates Hermiticity against tol.hermiticity.
  HermitianOperator(CompositeSpace space, Matrix matrix, std::string name,
                    const ToleranceConfig& tol = default_tolerances());

  const CompositeSpace& space() const { return space_; }
  const Matrix& matrix() const { return matrix_; }
  const std::string& name() const { return name_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }

  // max |M - M^H| elementwise.
  double hermiticity_error() const;
  double max_abs() const;

  HermitianOperator operator+(const HermitianOperator& rhs) const;
  HermitianOperator operator-(const HermitianOperator& rhs) const;
  HermitianOperator scaled(double factor) const;
  HermitianOperator renamed(std::string name) const;

  // y = M x through the dispatched kernels.
  Vector apply(const Vector& x) const;

 private:
  CompositeSpace space_;
  Matrix matrix_;
  std::string name_;
};

HermitianOperator operator*(double factor, const HermitianOperator& op);

// Zero / identity on a space.
HermitianOperator zero_operator(const CompositeSpace& space, std::string name = "0");
HermitianOperator identity_operator(const CompositeSpace& space, std::string name = "I");

// Lifts an operator defined on a single factor (its space must be exactly that
// factor) to `space`, tensoring identities on the remaining factors.
HermitianOperator embed(const HermitianOperator& op, const CompositeSpace& space);

// a (x) b on the concatenated space; both must be Hermitian so the product is.
HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b);

// <psi|op|psi>; NumericError if the imaginary part exceeds tol.imaginary_residue.
double expectation(const HermitianOperator& op, const QuantumState& psi,
                   const ToleranceConfig& tol = default_tolerances());

struct Eigensystem {
  RealVector values;  // ascending
  Matrix vectors;     // columns, orthonormal
};

Eigensystem eigensystem(const HermitianOperator& h);
Eigensystem eigensystem(const Matrix& hermitian);

// exp(-i H t) psi via the spectral decomposition.
QuantumState matrix_exponential_apply(const HermitianOperator& h, double t, const QuantumState& psi);

// Reusable spectral propagator for one Hamiltonian.
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const Matrix& hermitian);
  // psi <- exp(-i H t) psi, in place.
  void apply(double t, std::span<cplx> psi) const;
  const Eigensystem& spectrum() const { return eig_; }

 private:
  Eigensystem eig_;
};

class DensityMatrix {
 public:
  DensityMatrix() = default;
  DensityMatrix(CompositeSpace space, Matrix rho);
  static DensityMatrix pure(const QuantumState& psi);

  const CompositeSpace& space() const { return space_; }
  const Matrix& matrix() const { return rho_; }
  std::size_t dim() const { return static_cast<std::size_t>(rho_.rows()); }

  double trace() const;
  double purity() const;
  // <v|rho|v>
  double population(const Vector& v) const;
  double expectation(const HermitianOperator& op) const;
  double min_eigenvalue() const;
  // Throws NumericError when the trace or positivity tolerances are violated.
  void validate(const ToleranceConfig& tol = default_tolerances()) const;

 private:
  CompositeSpace space_;
  Matrix rho_;
};

DensityMatrix partial_trace(const QuantumState& psi, const std::string& keep);
DensityMatrix partial_trace(const DensityMatrix& rho, const std::string& keep);

// Pauli matrices and sigma . n on a spin factor.
HermitianOperator pauli_x(const HilbertFactor& spin);
HermitianOperator pauli_y(const HilbertFactor& spin);
HermitianOperator pauli_z(const HilbertFactor& spin);
HermitianOperator sigma_dot(const HilbertFactor& spin, const std::array<double, 3>& n);

}  // namespace protectsim::qcore
