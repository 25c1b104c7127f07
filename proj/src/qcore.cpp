#include "protectsim/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "protectsim/errors.hpp"
#include "protectsim/simd/kernels.hpp"

namespace protectsim::qcore {

namespace {

std::span<const cplx> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
std::span<cplx> as_span(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<const cplx> as_span(const Matrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

void require_same_space(const CompositeSpace& a, const CompositeSpace& b, const char* what) {
  if (!(a == b)) throw ConfigError(std::string(what) + ": operands live on different spaces");
}

}  // namespace

std::string to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::fock: return "fock";
    case BasisKind::grid_position: return "grid_position";
    case BasisKind::grid_momentum: return "grid_momentum";
    case BasisKind::spin: return "spin";
  }
  return "unknown";
}

BasisKind basis_kind_from_string(const std::string& s) {
  if (s == "fock") return BasisKind::fock;
  if (s == "grid_position") return BasisKind::grid_position;
  if (s == "grid_momentum") return BasisKind::grid_momentum;
  if (s == "spin") return BasisKind::spin;
  throw ConfigError("unknown basis kind '" + s + "'");
}

// --- factors and spaces -----------------------------------------------------

HilbertFactor HilbertFactor::fock(std::string label, std::size_t dim) {
  HilbertFactor f{std::move(label), dim, BasisKind::fock, std::nullopt};
  f.validate();
  return f;
}

HilbertFactor HilbertFactor::spin(std::string label) {
  HilbertFactor f{std::move(label), 2, BasisKind::spin, std::nullopt};
  f.validate();
  return f;
}

HilbertFactor HilbertFactor::grid_position(std::string label, double extent, std::size_t points) {
  HilbertFactor f{std::move(label), points, BasisKind::grid_position, GridSpec{extent, points}};
  f.validate();
  return f;
}

HilbertFactor HilbertFactor::grid_momentum(std::string label, double extent, std::size_t points) {
  HilbertFactor f{std::move(label), points, BasisKind::grid_momentum, GridSpec{extent, points}};
  f.validate();
  return f;
}

void HilbertFactor::validate() const {
  if (label.empty()) throw ConfigError("factor label must be non-empty");
  if (dim < 1) throw ConfigError("factor '" + label + "' must have dim >= 1");
  const bool is_grid = kind == BasisKind::grid_position || kind == BasisKind::grid_momentum;
  if (is_grid) {
    if (!grid) throw ConfigError("grid factor '" + label + "' needs a grid spec");
    if (grid->points != dim) throw ConfigError("grid factor '" + label + "': points != dim");
    if (!(grid->extent > 0.0)) throw ConfigError("grid factor '" + label + "': extent must be > 0");
  }
  if (kind == BasisKind::spin && dim != 2) throw ConfigError("spin factor '" + label + "' must have dim 2");
}

CompositeSpace::CompositeSpace(std::vector<HilbertFactor> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw ConfigError("composite space needs at least one factor");
  std::set<std::string> labels;
  total_dim_ = 1;
  for (const auto& f : factors_) {
    f.validate();
    if (!labels.insert(f.label).second) throw ConfigError("duplicate factor label '" + f.label + "'");
    total_dim_ *= f.dim;
    if (total_dim_ > kMaxTotalDim) {
      throw ConfigError("composite dimension exceeds the dense cap of " + std::to_string(kMaxTotalDim));
    }
  }
}

CompositeSpace CompositeSpace::single(HilbertFactor factor) {
  return CompositeSpace(std::vector<HilbertFactor>{std::move(factor)});
}

std::size_t CompositeSpace::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].label == label) return i;
  }
  throw ConfigError("unknown factor label '" + label + "'");
}

const HilbertFactor& CompositeSpace::factor(const std::string& label) const {
  return factors_[index_of(label)];
}

// --- states -----------------------------------------------------------------

QuantumState::QuantumState(CompositeSpace space, Vector amplitudes)
    : space_(std::move(space)), amps_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amps_.size()) != space_.total_dim()) {
    throw ConfigError("state length " + std::to_string(amps_.size()) + " does not match space dimension " +
                      std::to_string(space_.total_dim()));
  }
}

double QuantumState::norm() const { return std::sqrt(simd::norm_sq(as_span(amps_))); }

QuantumState QuantumState::normalized() const {
  const double n = norm();
  if (!(n > 0.0)) throw NumericError("cannot normalize a zero state");
  return QuantumState(space_, amps_ / n);
}

cplx QuantumState::overlap(const QuantumState& other) const {
  require_same_space(space_, other.space_, "overlap");
  return simd::dot_conj(as_span(amps_), as_span(other.amps_));
}

QuantumState tensor(const QuantumState& a, const QuantumState& b) {
  std::vector<HilbertFactor> factors = a.space().factors();
  factors.insert(factors.end(), b.space().factors().begin(), b.space().factors().end());
  const Eigen::Index na = a.amplitudes().size(), nb = b.amplitudes().size();
  Vector out(na * nb);
  for (Eigen::Index i = 0; i < na; ++i) out.segment(i * nb, nb) = a.amplitudes()(i) * b.amplitudes();
  return QuantumState(CompositeSpace(std::move(factors)), std::move(out));
}

// --- operators --------------------------------------------------------------

HermitianOperator::HermitianOperator(CompositeSpace space, Matrix matrix, std::string name,
                                     const ToleranceConfig& tol)
    : space_(std::move(space)), matrix_(std::move(matrix)), name_(std::move(name)) {
  const auto n = static_cast<Eigen::Index>(space_.total_dim());
  if (matrix_.rows() != n || matrix_.cols() != n) {
    throw ConfigError("operator '" + name_ + "' has shape " + std::to_string(matrix_.rows()) + "x" +
                      std::to_string(matrix_.cols()) + ", space needs " + std::to_string(n));
  }
  if (!matrix_.allFinite()) throw NumericError("operator '" + name_ + "' has non-finite entries");
  const double err = hermiticity_error();
  if (err > tol.hermiticity * std::max(1.0, max_abs())) {
    std::ostringstream os;
    os << "operator '" << name_ << "' is not Hermitian (max |M - M^H| = " << err << ")";
    throw NumericError(os.str());
  }
}

double HermitianOperator::hermiticity_error() const {
  if (matrix_.size() == 0) return 0.0;
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

double HermitianOperator::max_abs() const {
  return matrix_.size() == 0 ? 0.0 : matrix_.cwiseAbs().maxCoeff();
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& rhs) const {
  require_same_space(space_, rhs.space_, "operator sum");
  return HermitianOperator(space_, matrix_ + rhs.matrix_, name_ + "+" + rhs.name_);
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& rhs) const {
  require_same_space(space_, rhs.space_, "operator difference");
  return HermitianOperator(space_, matrix_ - rhs.matrix_, name_ + "-" + rhs.name_);
}

HermitianOperator HermitianOperator::scaled(double factor) const {
  return HermitianOperator(space_, factor * matrix_, name_);
}

HermitianOperator HermitianOperator::renamed(std::string name) const {
  HermitianOperator out = *this;
  out.name_ = std::move(name);
  return out;
}

Vector HermitianOperator::apply(const Vector& x) const {
  if (x.size() != matrix_.cols()) throw ConfigError("operator '" + name_ + "': vector length mismatch");
  Vector y(matrix_.rows());
  simd::matvec(as_span(matrix_), dim(), dim(), as_span(x), as_span(y));
  return y;
}

HermitianOperator operator*(double factor, const HermitianOperator& op) { return op.scaled(factor); }

HermitianOperator zero_operator(const CompositeSpace& space, std::string name) {
  const auto n = static_cast<Eigen::Index>(space.total_dim());
  return HermitianOperator(space, Matrix::Zero(n, n), std::move(name));
}

HermitianOperator identity_operator(const CompositeSpace& space, std::string name) {
  const auto n = static_cast<Eigen::Index>(space.total_dim());
  return HermitianOperator(space, Matrix::Identity(n, n), std::move(name));
}

HermitianOperator embed(const HermitianOperator& op, const CompositeSpace& space) {
  if (op.space().factor_count() != 1) {
    throw ConfigError("embed: operator '" + op.name() + "' must act on exactly one factor");
  }
  const HilbertFactor& f = op.space().factors().front();
  const std::size_t k = space.index_of(f.label);
  if (!(space.factors()[k] == f)) {
    throw ConfigError("embed: factor '" + f.label + "' dimension or kind mismatch");
  }
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < k; ++i) outer *= space.factors()[i].dim;
  for (std::size_t i = k + 1; i < space.factor_count(); ++i) inner *= space.factors()[i].dim;
  const auto d = static_cast<Eigen::Index>(f.dim);
  const auto n = static_cast<Eigen::Index>(space.total_dim());
  Matrix out = Matrix::Zero(n, n);
  const auto in = static_cast<Eigen::Index>(inner);
  for (Eigen::Index o = 0; o < static_cast<Eigen::Index>(outer); ++o) {
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        const cplx v = op.matrix()(i, j);
        if (v == cplx{}) continue;
        const Eigen::Index r0 = (o * d + i) * in, c0 = (o * d + j) * in;
        for (Eigen::Index r = 0; r < in; ++r) out(r0 + r, c0 + r) = v;
      }
    }
  }
  return HermitianOperator(space, std::move(out), op.name());
}

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b) {
  std::vector<HilbertFactor> factors = a.space().factors();
  factors.insert(factors.end(), b.space().factors().begin(), b.space().factors().end());
  CompositeSpace space(std::move(factors));
  const Eigen::Index na = a.matrix().rows(), nb = b.matrix().rows();
  Matrix out(na * nb, na * nb);
  for (Eigen::Index i = 0; i < na; ++i) {
    for (Eigen::Index j = 0; j < na; ++j) out.block(i * nb, j * nb, nb, nb) = a.matrix()(i, j) * b.matrix();
  }
  return HermitianOperator(std::move(space), std::move(out), a.name() + "*" + b.name());
}

double expectation(const HermitianOperator& op, const QuantumState& psi, const ToleranceConfig& tol) {
  require_same_space(op.space(), psi.space(), "expectation");
  const Vector opsi = op.apply(psi.amplitudes());
  const cplx z = simd::dot_conj(as_span(psi.amplitudes()), as_span(opsi));
  if (std::abs(z.imag()) > tol.imaginary_residue * std::max(1.0, std::abs(z))) {
    std::ostringstream os;
    os << "expectation of '" << op.name() << "' has imaginary part " << z.imag();
    throw NumericError(os.str());
  }
  return z.real();
}

// --- spectra and propagators ------------------------------------------------

Eigensystem eigensystem(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eigendecomposition failed (dim " << hermitian.rows() << ", max|H| "
       << (hermitian.size() ? hermitian.cwiseAbs().maxCoeff() : 0.0) << ", max|H - H^H| "
       << (hermitian.size() ? (hermitian - hermitian.adjoint()).cwiseAbs().maxCoeff() : 0.0) << ")";
    throw NumericError(os.str());
  }
  return Eigensystem{solver.eigenvalues(), solver.eigenvectors()};
}

Eigensystem eigensystem(const HermitianOperator& h) { return eigensystem(h.matrix()); }

SpectralPropagator::SpectralPropagator(const Matrix& hermitian) : eig_(eigensystem(hermitian)) {}

void SpectralPropagator::apply(double t, std::span<cplx> psi) const {
  const std::size_t n = static_cast<std::size_t>(eig_.values.size());
  if (psi.size() != n) throw ConfigError("propagator: state length mismatch");
  std::vector<cplx> coeff(n), phase(n);
  const std::span<const cplx> v(eig_.vectors.data(), n * n);
  simd::matvec_adjoint(v, n, n, psi, coeff);
  for (std::size_t i = 0; i < n; ++i) phase[i] = std::polar(1.0, -eig_.values(static_cast<Eigen::Index>(i)) * t);
  simd::hadamard(coeff, phase);
  simd::matvec(v, n, n, coeff, psi);
}

QuantumState matrix_exponential_apply(const HermitianOperator& h, double t, const QuantumState& psi) {
  require_same_space(h.space(), psi.space(), "matrix_exponential_apply");
  QuantumState out = psi;
  if (t == 0.0) return out;
  SpectralPropagator(h.matrix()).apply(t, as_span(out.amplitudes()));
  return out;
}

// --- density matrices -------------------------------------------------------

DensityMatrix::DensityMatrix(CompositeSpace space, Matrix rho) : space_(std::move(space)), rho_(std::move(rho)) {
  const auto n = static_cast<Eigen::Index>(space_.total_dim());
  if (rho_.rows() != n || rho_.cols() != n) throw ConfigError("density matrix shape does not match its space");
}

DensityMatrix DensityMatrix::pure(const QuantumState& psi) {
  return DensityMatrix(psi.space(), psi.amplitudes() * psi.amplitudes().adjoint());
}

double DensityMatrix::trace() const { return rho_.trace().real(); }

double DensityMatrix::purity() const {
  // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return simd::norm_sq(as_span(rho_));
}

double DensityMatrix::population(const Vector& v) const {
  if (v.size() != rho_.rows()) throw ConfigError("population: vector length mismatch");
  return (v.adjoint() * rho_ * v)(0, 0).real();
}

double DensityMatrix::expectation(const HermitianOperator& op) const {
  require_same_space(space_, op.space(), "density expectation");
  // tr(rho A) = sum_ij rho_ij A_ji = sum_ij conj(A_ij) rho_ij for Hermitian A.
  return simd::dot_conj(as_span(op.matrix()), as_span(rho_)).real();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho_, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("density matrix eigenvalues failed");
  return solver.eigenvalues()(0);
}

void DensityMatrix::validate(const ToleranceConfig& tol) const {
  if (std::abs(trace() - 1.0) > tol.density_trace) {
    throw NumericError("density matrix trace " + std::to_string(trace()) + " != 1");
  }
  if (min_eigenvalue() < -tol.density_negativity) {
    throw NumericError("density matrix has a negative eigenvalue " + std::to_string(min_eigenvalue()));
  }
}

namespace {

struct Split {
  std::size_t outer = 1, keep = 1, inner = 1;
};

Split split_for(const CompositeSpace& space, const std::string& keep) {
  const std::size_t k = space.index_of(keep);
  Split s;
  for (std::size_t i = 0; i < k; ++i) s.outer *= space.factors()[i].dim;
  s.keep = space.factors()[k].dim;
  for (std::size_t i = k + 1; i < space.factor_count(); ++i) s.inner *= space.factors()[i].dim;
  return s;
}

}  // namespace

DensityMatrix partial_trace(const QuantumState& psi, const std::string& keep) {
  const Split s = split_for(psi.space(), keep);
  const auto d = static_cast<Eigen::Index>(s.keep);
  Matrix rho = Matrix::Zero(d, d);
  const cplx* a = psi.amplitudes().data();
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t i = 0; i < s.keep; ++i) {
      const cplx* row_i = a + (o * s.keep + i) * s.inner;
      for (std::size_t j = 0; j <= i; ++j) {
        const cplx* row_j = a + (o * s.keep + j) * s.inner;
        // rho_ij += sum_r psi(o,i,r) conj(psi(o,j,r))
        rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
            simd::active().dot_conj(row_j, row_i, s.inner);
      }
    }
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) rho(i, j) = std::conj(rho(j, i));
  }
  return DensityMatrix(CompositeSpace::single(psi.space().factor(keep)), std::move(rho));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::string& keep) {
  const Split s = split_for(rho.space(), keep);
  const auto d = static_cast<Eigen::Index>(s.keep);
  Matrix out = Matrix::Zero(d, d);
  const Matrix& m = rho.matrix();
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t i = 0; i < s.keep; ++i) {
      for (std::size_t j = 0; j < s.keep; ++j) {
        cplx acc{};
        for (std::size_t r = 0; r < s.inner; ++r) {
          acc += m(static_cast<Eigen::Index>((o * s.keep + i) * s.inner + r),
                   static_cast<Eigen::Index>((o * s.keep + j) * s.inner + r));
        }
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += acc;
      }
    }
  }
  return DensityMatrix(CompositeSpace::single(rho.space().factor(keep)), std::move(out));
}

// --- spin helpers -----------------------------------------------------------

namespace {
HermitianOperator spin_op(const HilbertFactor& spin, Matrix m, std::string name) {
  if (spin.dim != 2) throw ConfigError("Pauli operators need a 2-dimensional factor");
  return HermitianOperator(CompositeSpace::single(spin), std::move(m), std::move(name));
}
}  // namespace

HermitianOperator pauli_x(const HilbertFactor& spin) {
  Matrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return spin_op(spin, std::move(m), "sigma_x");
}

HermitianOperator pauli_y(const HilbertFactor& spin) {
  Matrix m(2, 2);
  m << 0.0, cplx(0, -1), cplx(0, 1), 0.0;
  return spin_op(spin, std::move(m), "sigma_y");
}

HermitianOperator pauli_z(const HilbertFactor& spin) {
  Matrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return spin_op(spin, std::move(m), "sigma_z");
}

HermitianOperator sigma_dot(const HilbertFactor& spin, const std::array<double, 3>& n) {
  Matrix m(2, 2);
  m << n[2], cplx(n[0], -n[1]), cplx(n[0], n[1]), -n[2];
  return spin_op(spin, std::move(m), "sigma.n");
}

}  // namespace protectsim::qcore
