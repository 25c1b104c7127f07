#include "protectsim/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "protectsim/errors.hpp"

namespace protectsim::models {

using qcore::CompositeSpace;
using qcore::cplx;
using qcore::HilbertFactor;
using qcore::Matrix;
using qcore::RealVector;
using qcore::Vector;

namespace {

constexpr double kUnitTol = 1e-12;

double norm3(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }
double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

void require_unit(const Vec3& v, const char* what) {
  if (std::abs(norm3(v) - 1.0) > kUnitTol) {
    throw ConfigError(std::string(what) + " must be a unit vector");
  }
}

bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

HermitianOperator on_factor(const HilbertFactor& f, Matrix m, std::string name) {
  return HermitianOperator(CompositeSpace::single(f), std::move(m), std::move(name));
}

HermitianOperator diagonal_on(const HilbertFactor& f, const RealVector& d, std::string name) {
  return on_factor(f, d.cast<cplx>().asDiagonal().toDenseMatrix(), std::move(name));
}

// +1 (up) or -1 eigenvector of sigma . n.
QuantumState spin_eigenstate(const HilbertFactor& spin, const Vec3& n, bool up) {
  const double theta = std::acos(std::clamp(n[2], -1.0, 1.0));
  const double phi = std::atan2(n[1], n[0]);
  Vector v(2);
  if (up) {
    v << std::cos(theta / 2), std::polar(std::sin(theta / 2), phi);
  } else {
    v << -std::sin(theta / 2), std::polar(std::cos(theta / 2), phi);
  }
  return QuantumState(CompositeSpace::single(spin), v);
}

Scenario assemble(std::string name, HermitianOperator h_a, HermitianOperator h_s, HermitianOperator q_a,
                  HermitianOperator q_s, HermitianOperator pointer, QuantumState init_a, QuantumState init_s) {
  Scenario s;
  s.name = std::move(name);
  s.space = CompositeSpace({h_a.space().factors().front(), h_s.space().factors().front()});
  s.h_apparatus = std::move(h_a);
  s.h_system = std::move(h_s);
  s.q_apparatus = std::move(q_a);
  s.q_system = std::move(q_s);
  s.pointer = std::move(pointer);
  s.initial_apparatus = std::move(init_a);
  s.initial_system = std::move(init_s);
  s.initial = qcore::tensor(s.initial_apparatus, s.initial_system);
  return s;
}

}  // namespace

// --- parameter validation ---------------------------------------------------

void OscillatorParams::validate() const {
  if (!(mass > 0.0)) throw ConfigError("oscillator mass must be > 0");
  if (!(omega >= 0.0)) throw ConfigError("oscillator frequency must be >= 0");
  if (fock_dim < 2) throw ConfigError("fock_dim must be >= 2");
}

void SpinFieldParams::validate() const {
  if (!std::isfinite(mu) || !std::isfinite(b0) || !std::isfinite(bi)) {
    throw ConfigError("spin field parameters must be finite");
  }
  require_unit(field_dir, "field direction");
  require_unit(coupling_dir, "coupling direction");
}

SpinFieldParams SpinFieldParams::with_angle(double mu, double b0, double bi, double theta) {
  SpinFieldParams p;
  p.mu = mu;
  p.b0 = b0;
  p.bi = bi;
  p.field_dir = {0.0, 0.0, 1.0};
  p.coupling_dir = {std::sin(theta), 0.0, std::cos(theta)};
  return p;
}

void PacketParams::validate() const {
  if (!(width > 0.0)) throw ConfigError("packet width must be > 0");
  if (!(extent >= 10.0 * width)) throw ConfigError("grid extent must be at least 10 packet widths");
  if (!is_power_of_two(points)) throw ConfigError("grid points must be a power of two");
  if (!std::isfinite(center) || !std::isfinite(momentum)) throw ConfigError("packet center/momentum must be finite");
}

double SpreadingLaw::predicted_width2(double T) const {
  return 0.5 * (width * width + T * T / (mass * mass * width * width));
}

// --- grids ------------------------------------------------------------------

RealVector grid_positions(std::size_t points, double extent) {
  RealVector x(static_cast<Eigen::Index>(points));
  const double dx = extent / static_cast<double>(points);
  for (std::size_t j = 0; j < points; ++j) x(static_cast<Eigen::Index>(j)) = -0.5 * extent + dx * static_cast<double>(j);
  return x;
}

RealVector grid_momenta(std::size_t points, double extent) {
  RealVector k(static_cast<Eigen::Index>(points));
  const double dk = 2.0 * std::numbers::pi / extent;
  const auto half = static_cast<double>(points / 2);
  for (std::size_t m = 0; m < points; ++m) k(static_cast<Eigen::Index>(m)) = (static_cast<double>(m) - half) * dk;
  return k;
}

Matrix dft_matrix(std::size_t points, double extent) {
  const RealVector x = grid_positions(points, extent);
  const RealVector k = grid_momenta(points, extent);
  const auto n = static_cast<Eigen::Index>(points);
  const double scale = 1.0 / std::sqrt(static_cast<double>(points));
  Matrix f(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index j = 0; j < n; ++j) f(m, j) = std::polar(scale, -k(m) * x(j));
  }
  return f;
}

HermitianOperator grid_position_operator(const HilbertFactor& f) {
  if (!f.grid) throw ConfigError("factor '" + f.label + "' is not a grid");
  const RealVector x = grid_positions(f.dim, f.grid->extent);
  if (f.kind == qcore::BasisKind::grid_position) return diagonal_on(f, x, "x");
  const Matrix F = dft_matrix(f.dim, f.grid->extent);
  return on_factor(f, hermitian_part(F * x.cast<cplx>().asDiagonal() * F.adjoint()), "x");
}

HermitianOperator grid_momentum_operator(const HilbertFactor& f) {
  if (!f.grid) throw ConfigError("factor '" + f.label + "' is not a grid");
  const RealVector k = grid_momenta(f.dim, f.grid->extent);
  if (f.kind == qcore::BasisKind::grid_momentum) return diagonal_on(f, k, "p");
  const Matrix F = dft_matrix(f.dim, f.grid->extent);
  return on_factor(f, hermitian_part(F.adjoint() * k.cast<cplx>().asDiagonal() * F), "p");
}

QuantumState build_grid_packet(const PacketParams& p, const std::string& label) {
  p.validate();
  const HilbertFactor f = HilbertFactor::grid_position(label, p.extent, p.points);
  const RealVector x = grid_positions(p.points, p.extent);
  Vector psi(static_cast<Eigen::Index>(p.points));
  for (Eigen::Index j = 0; j < psi.size(); ++j) {
    const double u = (x(j) - p.center) / p.width;
    psi(j) = std::polar(std::exp(-0.5 * u * u), p.momentum * x(j));
  }
  psi /= psi.norm();
  const double edge = std::max(std::abs(psi(0)), std::abs(psi(psi.size() - 1)));
  if (edge > 1e-8) {
    std::ostringstream os;
    os << "packet leaks to the grid boundary (edge amplitude " << edge << "); enlarge the extent";
    throw PhysicsError(os.str());
  }
  return QuantumState(CompositeSpace::single(f), std::move(psi));
}

QuantumState to_momentum_basis(const QuantumState& s) {
  if (s.space().factor_count() != 1 || s.space().factors()[0].kind != qcore::BasisKind::grid_position) {
    throw ConfigError("to_momentum_basis needs a single grid_position factor");
  }
  const HilbertFactor& f = s.space().factors()[0];
  const Matrix F = dft_matrix(f.dim, f.grid->extent);
  return QuantumState(CompositeSpace::single(HilbertFactor::grid_momentum(f.label, f.grid->extent, f.dim)),
                      F * s.amplitudes());
}

QuantumState to_position_basis(const QuantumState& s) {
  if (s.space().factor_count() != 1 || s.space().factors()[0].kind != qcore::BasisKind::grid_momentum) {
    throw ConfigError("to_position_basis needs a single grid_momentum factor");
  }
  const HilbertFactor& f = s.space().factors()[0];
  const Matrix F = dft_matrix(f.dim, f.grid->extent);
  return QuantumState(CompositeSpace::single(HilbertFactor::grid_position(f.label, f.grid->extent, f.dim)),
                      F.adjoint() * s.amplitudes());
}

// --- oscillators ------------------------------------------------------------

FockOps build_fock_ops(const OscillatorParams& p, const std::string& label) {
  p.validate();
  if (!(p.omega > 0.0)) throw ConfigError("ladder construction needs omega > 0");
  const HilbertFactor f = HilbertFactor::fock(label, p.fock_dim);
  const auto n = static_cast<Eigen::Index>(p.fock_dim);
  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  const Matrix ad = a.adjoint();
  RealVector number(n), energy(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    number(k) = static_cast<double>(k);
    energy(k) = p.omega * (static_cast<double>(k) + 0.5);
  }
  const double xs = std::sqrt(1.0 / (2.0 * p.mass * p.omega));
  const double ps = std::sqrt(p.mass * p.omega / 2.0);
  return FockOps{diagonal_on(f, energy, "H_osc"), on_factor(f, xs * (a + ad), "X"),
                 on_factor(f, cplx(0.0, ps) * (ad - a), "P"), diagonal_on(f, number, "n")};
}

QuantumState fock_state(const HilbertFactor& f, std::size_t n) {
  if (n >= f.dim) throw ConfigError("Fock level exceeds the truncation");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(f.dim));
  v(static_cast<Eigen::Index>(n)) = 1.0;
  return QuantumState(CompositeSpace::single(f), std::move(v));
}

// --- scenarios --------------------------------------------------------------

bool Scenario::has_tag(const std::string& tag) const {
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

HermitianOperator Scenario::h0() const {
  return (qcore::embed(h_apparatus, space) + qcore::embed(h_system, space)).renamed("H0");
}

HermitianOperator Scenario::coupling() const { return qcore::kron(q_apparatus, q_system).renamed("QA*QS"); }

HermitianOperator Scenario::pointer_full() const { return qcore::embed(pointer, space); }

Scenario build_aav_spin(const SpinFieldParams& p, const PacketParams& packet) {
  p.validate();
  packet.validate();
  const HilbertFactor app = HilbertFactor::grid_position(kApparatus, packet.extent, packet.points);
  const HilbertFactor spin = HilbertFactor::spin(kSystem);
  const HermitianOperator sigma_field = qcore::sigma_dot(spin, p.field_dir);
  const HermitianOperator sigma_coupling = qcore::sigma_dot(spin, p.coupling_dir);

  Scenario s = assemble("aav", qcore::zero_operator(CompositeSpace::single(app), "H_A"),
                        sigma_field.scaled(-p.mu * p.b0).renamed("H_S"),
                        grid_position_operator(app).renamed("Q_A"),
                        sigma_coupling.scaled(-p.mu * p.bi).renamed("Q_S"),
                        grid_momentum_operator(app).renamed("pointer"), build_grid_packet(packet, kApparatus),
                        spin_eigenstate(spin, p.field_dir, true));
  // exp(-i x <Q_S>) moves the momentum by -<Q_S> = +mu B_i n.n~.
  s.pointer_sign = -1.0;
  s.pointer_on_conjugate_grid = true;
  s.predicted_shift = p.mu * p.bi * dot3(p.coupling_dir, p.field_dir);
  s.tags = {"aav", "pointer:momentum"};
  s.recipe = AavRecipe{p, packet};
  return s;
}

Scenario build_momentum_coupled(const SpinFieldParams& p, const PacketParams& packet, double mass, bool system_up) {
  p.validate();
  packet.validate();
  if (!(mass > 0.0)) throw ConfigError("apparatus mass must be > 0");
  const HilbertFactor app = HilbertFactor::grid_momentum(kApparatus, packet.extent, packet.points);
  const HilbertFactor spin = HilbertFactor::spin(kSystem);
  const RealVector k = grid_momenta(packet.points, packet.extent);
  const RealVector kinetic = k.array().square() / (2.0 * mass);

  QuantumState packet_p = to_momentum_basis(build_grid_packet(packet, kApparatus));
  QuantumState nu = spin_eigenstate(spin, p.field_dir, system_up);
  Scenario s = assemble("momentum-coupled", diagonal_on(app, kinetic, "H_A"),
                        qcore::sigma_dot(spin, p.field_dir).scaled(p.mu * p.b0).renamed("H_S"),
                        diagonal_on(app, k, "Q_A"),
                        qcore::sigma_dot(spin, p.coupling_dir).scaled(p.mu * p.bi).renamed("Q_S"),
                        grid_position_operator(app).renamed("pointer"), std::move(packet_p), nu);
  // exp(-i P <Q_S>) translates the position by +<Q_S>.
  s.pointer_sign = 1.0;
  s.pointer_on_conjugate_grid = true;
  s.predicted_shift = (system_up ? 1.0 : -1.0) * p.mu * p.bi * dot3(p.coupling_dir, p.field_dir);
  s.spreading = SpreadingLaw{packet.width, mass};
  s.tags = {"momentum-coupled", "pointer:position", "spreading"};
  s.recipe = MomentumCoupledRecipe{p, packet, mass, system_up};
  return s;
}

Scenario build_degenerate_oscillators(const OscillatorParams& pa, const OscillatorParams& ps,
                                      std::size_t excitation) {
  pa.validate();
  ps.validate();
  if (std::abs(pa.omega - ps.omega) > kUnitTol) {
    throw PhysicsError("degenerate oscillators need equal frequencies");
  }
  if (pa.fock_dim < excitation + 2 || ps.fock_dim < excitation + 2) {
    throw ConfigError("fock_dim must be at least excitation + 2");
  }
  const FockOps a = build_fock_ops(pa, kApparatus);
  const FockOps b = build_fock_ops(ps, kSystem);
  const HilbertFactor& fa = a.hamiltonian.space().factors()[0];
  const HilbertFactor& fs = b.hamiltonian.space().factors()[0];
  Scenario s = assemble("degenerate-osc", a.hamiltonian.renamed("H_A"), b.hamiltonian.renamed("H_S"),
                        a.position.renamed("Q_A"), b.position.renamed("Q_S"), a.momentum.renamed("pointer"),
                        fock_state(fa, excitation), fock_state(fs, 0));
  s.pointer_sign = -1.0;
  s.tags = {"degenerate", "pointer:momentum"};
  if (excitation == 1) {
    // Rotation inside span{|1,0>, |0,1>} by lambda = <0|X|1><1|x|0>.
    const double lambda = (a.position.matrix()(0, 1) * b.position.matrix()(1, 0)).real();
    Vector v = Vector::Zero(static_cast<Eigen::Index>(s.space.total_dim()));
    v(static_cast<Eigen::Index>(1 * fs.dim + 0)) = std::cos(lambda);
    v(static_cast<Eigen::Index>(0 * fs.dim + 1)) = std::abs(std::sin(lambda));
    s.predicted_final = QuantumState(s.space, std::move(v));
  }
  s.recipe = DegenerateOscillatorsRecipe{pa, ps, excitation};
  return s;
}

Scenario build_degenerate_spin_oscillator(const OscillatorParams& p, double mu_b0, const Vec3& n) {
  p.validate();
  require_unit(n, "coupling direction");
  if (std::abs(mu_b0 - 0.5 * p.omega) > kUnitTol) {
    std::ostringstream os;
    os << "degenerate spin-oscillator needs mu B0 = omega / 2 (got mu B0 = " << mu_b0 << ", omega = " << p.omega
       << ")";
    throw PhysicsError(os.str());
  }
  const FockOps a = build_fock_ops(p, kApparatus);
  const HilbertFactor& fa = a.hamiltonian.space().factors()[0];
  const HilbertFactor spin = HilbertFactor::spin(kSystem);
  Scenario s = assemble("degenerate-spin-osc", a.hamiltonian.renamed("H_A"),
                        qcore::pauli_z(spin).scaled(mu_b0).renamed("H_S"), a.position.renamed("Q_A"),
                        qcore::sigma_dot(spin, n).renamed("Q_S"), a.momentum.renamed("pointer"),
                        fock_state(fa, 0), spin_eigenstate(spin, {0.0, 0.0, 1.0}, true));
  s.pointer_sign = -1.0;
  s.tags = {"degenerate", "pointer:momentum"};
  s.recipe = DegenerateSpinOscillatorRecipe{p, mu_b0, n};
  return s;
}

Scenario build_custom(const CustomRecipe& r) {
  r.apparatus.validate();
  r.system.validate();
  if (r.apparatus.label == r.system.label) throw ConfigError("apparatus and system labels must differ");
  if (r.pointer_sign != 1.0 && r.pointer_sign != -1.0) throw ConfigError("pointer_sign must be +1 or -1");
  auto op_a = [&](const Matrix& m, const char* name) { return on_factor(r.apparatus, m, name); };
  auto op_s = [&](const Matrix& m, const char* name) { return on_factor(r.system, m, name); };
  auto state = [](const HilbertFactor& f, const Vector& v) {
    QuantumState q(CompositeSpace::single(f), v);
    if (std::abs(q.norm() - 1.0) > 1e-10) throw ConfigError("custom initial states must be normalized");
    return q;
  };
  Scenario s = assemble("custom", op_a(r.h_apparatus, "H_A"), op_s(r.h_system, "H_S"), op_a(r.q_apparatus, "Q_A"),
                        op_s(r.q_system, "Q_S"), op_a(r.pointer, "pointer"), state(r.apparatus, r.initial_apparatus),
                        state(r.system, r.initial_system));
  s.pointer_sign = r.pointer_sign;
  s.predicted_shift = r.predicted_shift;
  s.tags = r.tags;
  s.recipe = r;
  return s;
}

Scenario build(const ScenarioRecipe& recipe) {
  return std::visit(
      [](const auto& r) -> Scenario {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, AavRecipe>) {
          return build_aav_spin(r.field, r.packet);
        } else if constexpr (std::is_same_v<R, MomentumCoupledRecipe>) {
          return build_momentum_coupled(r.field, r.packet, r.mass, r.system_up);
        } else if constexpr (std::is_same_v<R, DegenerateOscillatorsRecipe>) {
          return build_degenerate_oscillators(r.apparatus, r.system, r.excitation);
        } else if constexpr (std::is_same_v<R, DegenerateSpinOscillatorRecipe>) {
          return build_degenerate_spin_oscillator(r.apparatus, r.mu_b0, r.coupling_dir);
        } else {
          return build_custom(r);
        }
      },
      recipe);
}

void validate(const Scenario& s, const ToleranceConfig& tol) {
  if (s.space.factor_count() != 2) throw ConfigError("scenario space must have exactly two factors");
  const auto app = CompositeSpace::single(s.space.factors()[0]);
  const auto sys = CompositeSpace::single(s.space.factors()[1]);
  if (!(s.h_apparatus.space() == app) || !(s.q_apparatus.space() == app) || !(s.pointer.space() == app)) {
    throw ConfigError("apparatus operators must act on the apparatus factor");
  }
  if (!(s.h_system.space() == sys) || !(s.q_system.space() == sys)) {
    throw ConfigError("system operators must act on the system factor");
  }
  if (!(s.initial.space() == s.space)) throw ConfigError("initial state lives on the wrong space");
  if (std::abs(s.initial.norm() - 1.0) > tol.unitarity * 100) throw PhysicsError("initial state is not normalized");
  for (const auto& label : {s.apparatus_label(), s.system_label()}) {
    const double purity = qcore::partial_trace(s.initial, label).purity();
    if (std::abs(purity - 1.0) > tol.product_purity) throw PhysicsError("initial state is not a product state");
  }
  if (!s.has_tag("non-eigenstate-demo")) {
    const Vector& nu = s.initial_system.amplitudes();
    const Vector hnu = s.h_system.matrix() * nu;
    const cplx e = nu.dot(hnu);
    const double residual = (hnu - e * nu).norm();
    if (residual > tol.eigenstate * std::max(1.0, s.h_system.max_abs())) {
      throw PhysicsError("system initial state is not an eigenstate of H_S (residual " + std::to_string(residual) + ")");
    }
  }
}

// --- first-order perturbation theory ----------------------------------------

namespace {

// Eigenbasis of H_A in which Q_A is diagonal inside every degenerate cluster.
qcore::Eigensystem adapted_apparatus_basis(const Matrix& h_a, const Matrix& q_a, double gap_tol) {
  qcore::Eigensystem eig = qcore::eigensystem(h_a);
  const Eigen::Index n = eig.values.size();
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index end = start + 1;
    while (end < n && eig.values(end) - eig.values(end - 1) < gap_tol) ++end;
    const Eigen::Index len = end - start;
    if (len > 1) {
      const Matrix block = eig.vectors.middleCols(start, len);
      const Matrix q = hermitian_part(block.adjoint() * q_a * block);
      const qcore::Eigensystem inner = qcore::eigensystem(q);
      eig.vectors.middleCols(start, len) = block * inner.vectors;
    }
    start = end;
  }
  return eig;
}

}  // namespace

PerturbativePrediction perturbative_prediction(const Scenario& s, const ToleranceConfig& tol) {
  const qcore::Eigensystem sys = qcore::eigensystem(s.h_system);
  const Vector& nu = s.initial_system.amplitudes();

  // Identify nu among the H_S eigenvectors.
  const RealVector weights = (sys.vectors.adjoint() * nu).cwiseAbs2();
  Eigen::Index inu = 0;
  const double best = weights.maxCoeff(&inu);
  if (best < 1.0 - tol.eigenstate) throw PhysicsError("system initial state is not an eigenstate of H_S");

  const double e_s_range = sys.values.maxCoeff() - sys.values.minCoeff();
  const qcore::Eigensystem probe = qcore::eigensystem(s.h_apparatus);
  const double e_a_range = probe.values.maxCoeff() - probe.values.minCoeff();
  const double range = e_s_range + e_a_range;
  const double gap_tol = tol.gap_relative * (range > 0.0 ? range : 1.0);

  for (Eigen::Index mu = 0; mu < sys.values.size(); ++mu) {
    if (mu != inu && std::abs(sys.values(mu) - sys.values(inu)) < gap_tol) {
      throw DegeneracyError("system eigenvalue of the initial state is degenerate", 0.0, 0.0);
    }
  }

  const qcore::Eigensystem app = adapted_apparatus_basis(s.h_apparatus.matrix(), s.q_apparatus.matrix(), gap_tol);
  const Matrix qs = sys.vectors.adjoint() * s.q_system.matrix() * sys.vectors;
  const Matrix qa = app.vectors.adjoint() * s.q_apparatus.matrix() * app.vectors;
  const Vector d = app.vectors.adjoint() * s.initial_apparatus.amplitudes();

  const Eigen::Index ds = sys.values.size(), da = app.values.size();
  double c2 = 0.0;
  for (Eigen::Index b = 0; b < da; ++b) {
    const double wb = std::norm(d(b));
    if (std::sqrt(wb) <= tol.matrix_element) continue;
    const double e_init = sys.values(inu) + app.values(b);
    for (Eigen::Index mu = 0; mu < ds; ++mu) {
      const cplx qs_el = qs(mu, inu);
      for (Eigen::Index a = 0; a < da; ++a) {
        if (mu == inu && a == b) continue;
        const cplx m = qs_el * qa(a, b);
        const double gap = e_init - (sys.values(mu) + app.values(a));
        if (std::abs(gap) < gap_tol) {
          if (std::abs(m) > tol.matrix_element) {
            std::ostringstream os;
            os << "coupling connects degenerate unperturbed states (gap " << gap << ", |element| " << std::abs(m)
               << "); the perturbation is not diagonal in the degenerate subspace";
            throw DegeneracyError(os.str(), gap, std::abs(m));
          }
          continue;
        }
        if (mu != inu) c2 += wb * std::norm(m / gap);
      }
    }
  }

  PerturbativePrediction out;
  out.system_expectation = qs(inu, inu).real();
  out.shift = s.pointer_sign * out.system_expectation;
  out.correction_coefficient = std::sqrt(c2);
  out.nu_energy = sys.values(inu);
  out.gap_tolerance = gap_tol;
  return out;
}

}  // namespace protectsim::models
