#include <doctest.h>

#include <cmath>
#include <numbers>

#include "protectsim/errors.hpp"
#include "protectsim/evolve.hpp"
#include "protectsim/models.hpp"
#include "protectsim/protect.hpp"

using namespace protectsim;
using namespace protectsim::models;
using qcore::cplx;
using qcore::Matrix;

namespace {

PacketParams packet(double eps, double L, std::size_t n = 256) {
  PacketParams p;
  p.width = eps;
  p.extent = L;
  p.points = n;
  return p;
}

// <x> and <x^2> computed directly from amplitudes on the grid.
std::pair<double, double> position_moments(const QuantumState& s) {
  auto xs = grid_positions(s.dim(), s.space().factors()[0].grid->extent);
  double m1 = 0, m2 = 0;
  for (Eigen::Index j = 0; j < xs.size(); ++j) {
    double p = std::norm(s.amplitudes()(j));
    m1 += p * xs(j);
    m2 += p * xs(j) * xs(j);
  }
  return {m1, m2};
}

}  // namespace

TEST_CASE("fock operators") {
  OscillatorParams p;
  p.fock_dim = 3;
  auto ops = build_fock_ops(p);
  CHECK(ops.position.matrix()(0, 1).real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(ops.hamiltonian.matrix()(0, 0).real() == doctest::Approx(0.5));
  CHECK(ops.hamiltonian.matrix()(1, 1).real() == doctest::Approx(1.5));
  CHECK(ops.hamiltonian.matrix()(2, 2).real() == doctest::Approx(2.5));
  CHECK(ops.hamiltonian.matrix()(0, 1) == cplx(0, 0));

  p.fock_dim = 12;
  auto big = build_fock_ops(p);
  Matrix comm = big.position.matrix() * big.momentum.matrix() - big.momentum.matrix() * big.position.matrix();
  for (int i = 0; i < 11; ++i)
    for (int j = 0; j < 11; ++j) {
      cplx want = i == j ? cplx(0, 1) : cplx(0, 0);
      CHECK(std::abs(comm(i, j) - want) < 1e-12);
    }
  // The top level breaks the canonical relation.
  CHECK(std::abs(comm(11, 11) - cplx(0, 1)) > 1.0);

  OscillatorParams bad;
  bad.omega = 0.0;
  CHECK_THROWS_AS(build_fock_ops(bad), ConfigError);
  bad = OscillatorParams{};
  bad.fock_dim = 1;
  CHECK_THROWS_AS(build_fock_ops(bad), ConfigError);
}

TEST_CASE("grid packet moments") {
  auto s = build_grid_packet(packet(1.0, 20.0));
  CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-14));
  auto [m1, m2] = position_moments(s);
  CHECK(std::abs(m1) < 20.0 / 256);
  CHECK(m2 == doctest::Approx(0.5).epsilon(0.01));

  auto moved = packet(1.0, 20.0);
  moved.center = 1.5;
  auto [c1, c2] = position_moments(build_grid_packet(moved));
  CHECK(std::abs(c1 - 1.5) < 20.0 / 256);
  CHECK(c2 - c1 * c1 == doctest::Approx(0.5).epsilon(0.01));

  auto kicked = packet(1.0, 20.0);
  kicked.momentum = 2.0;
  auto ks = build_grid_packet(kicked);
  auto P = grid_momentum_operator(ks.space().factors()[0]);
  CHECK(qcore::expectation(P, ks) == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("grid packet rejects leakage and bad params") {
  CHECK_THROWS_AS(build_grid_packet(packet(1.0, 10.0)), PhysicsError);
  CHECK_THROWS_AS(build_grid_packet(packet(1.0, 8.0)), ConfigError);
  CHECK_THROWS_AS(build_grid_packet(packet(1.0, 20.0, 100)), ConfigError);
  CHECK_THROWS_AS(build_grid_packet(packet(-1.0, 20.0)), ConfigError);
}

TEST_CASE("fourier round trip") {
  auto moved = packet(1.0, 20.0, 128);
  moved.momentum = 1.0;
  moved.center = -2.0;
  auto x = build_grid_packet(moved);
  auto k = to_momentum_basis(x);
  CHECK(k.space().factors()[0].kind == qcore::BasisKind::grid_momentum);
  CHECK(k.norm() == doctest::Approx(1.0).epsilon(1e-12));
  auto back = to_position_basis(k);
  CHECK((back.amplitudes() - x.amplitudes()).norm() < 1e-10);

  Matrix F = dft_matrix(64, 12.0);
  CHECK((F.adjoint() * F - Matrix::Identity(64, 64)).cwiseAbs().maxCoeff() < 1e-12);

  // The momentum operator on the position grid is diagonal after the transform.
  auto fx = qcore::HilbertFactor::grid_position("a", 12.0, 64);
  Matrix Pk = F * grid_momentum_operator(fx).matrix() * F.adjoint();
  auto ks = grid_momenta(64, 12.0);
  for (int i = 0; i < 64; ++i) CHECK(std::abs(Pk(i, i) - cplx(ks(i), 0)) < 1e-10);
  CHECK((Pk - Matrix(Pk.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("aav scenario shifts") {
  auto pk = packet(50.0, 800.0);
  auto s = build_aav_spin(SpinFieldParams::with_angle(1, 1, 0.1, std::numbers::pi / 3), pk);
  REQUIRE(s.predicted_shift);
  CHECK(*s.predicted_shift == doctest::Approx(0.05).epsilon(1e-12));
  double numeric = s.pointer_sign * qcore::expectation(s.q_system, s.initial_system);
  CHECK(std::abs(numeric - *s.predicted_shift) < 1e-10);
  CHECK_NOTHROW(validate(s));

  auto aligned = build_aav_spin(SpinFieldParams::with_angle(1, 1, 0.1, 0.0), pk);
  CHECK(*aligned.predicted_shift == doctest::Approx(0.1));
  auto ortho = build_aav_spin(SpinFieldParams::with_angle(1, 1, 0.1, std::numbers::pi / 2), pk);
  CHECK(std::abs(*ortho.predicted_shift) < 1e-12);
  CHECK(std::abs(ortho.pointer_sign * qcore::expectation(ortho.q_system, ortho.initial_system)) < 1e-10);

  // The system starts in the ground state of H_S.
  auto eig = qcore::eigensystem(s.h_system);
  CHECK(std::abs(std::abs(s.initial_system.amplitudes().dot(eig.vectors.col(0))) - 1.0) < 1e-12);
  CHECK(s.h_apparatus.max_abs() == 0.0);

  SpinFieldParams skew = SpinFieldParams::with_angle(1, 1, 0.1, 0.2);
  skew.coupling_dir[0] *= 1.1;
  CHECK_THROWS_AS(build_aav_spin(skew, pk), ConfigError);
}

TEST_CASE("momentum-coupled scenario") {
  SpinFieldParams f = SpinFieldParams::with_angle(1, 1, 0.1, 0.0);
  auto s = build_momentum_coupled(f, packet(1.0, 40.0), 1.0);
  Matrix ha = s.h_apparatus.matrix(), qa = s.q_apparatus.matrix();
  CHECK((ha * qa - qa * ha).cwiseAbs().maxCoeff() == 0.0);
  CHECK(*s.predicted_shift == doctest::Approx(0.1));
  REQUIRE(s.spreading);
  CHECK(s.spreading->predicted_width2(2.0) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(s.spreading->predicted_width2(0.0) == doctest::Approx(0.5).epsilon(1e-14));

  auto down = build_momentum_coupled(f, packet(1.0, 40.0), 1.0, false);
  CHECK(*down.predicted_shift == doctest::Approx(-0.1));
  CHECK_NOTHROW(validate(s));

  // Diagonal Q_A: the plane-wave degeneracies never trigger the screen.
  CHECK_NOTHROW(perturbative_prediction(s));
}

TEST_CASE("degenerate oscillators closed form") {
  OscillatorParams a;
  auto s = build_degenerate_oscillators(a, a, 1);
  CHECK(s.has_tag("degenerate"));
  REQUIRE(s.predicted_final);
  const auto& v = s.predicted_final->amplitudes();
  std::size_t dS = s.space.factors()[1].dim;
  CHECK(std::abs(v(dS)) == doctest::Approx(0.87758).epsilon(1e-5));
  CHECK(std::abs(v(1)) == doctest::Approx(0.47943).epsilon(1e-5));
  // Lambda from the ladder matrix elements.
  double lambda = s.q_apparatus.matrix()(0, 1).real() * s.q_system.matrix()(1, 0).real();
  CHECK(lambda == doctest::Approx(0.5).epsilon(1e-12));

  OscillatorParams other;
  other.omega = 1.5;
  CHECK_THROWS_AS(build_degenerate_oscillators(a, other, 1), PhysicsError);
  CHECK_THROWS_AS(perturbative_prediction(s), DegeneracyError);

  // Heavy oscillators decouple.
  OscillatorParams heavy;
  heavy.mass = 1e6;
  heavy.fock_dim = 6;
  auto h = build_degenerate_oscillators(heavy, heavy, 1);
  auto r = protect::run_protective(h, evolve::CouplingProfile::rectangular(20), {1, 0});
  CHECK(r.system_fidelity == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("degenerate oscillators amplitudes do not depend on T") {
  OscillatorParams a;
  a.fock_dim = 12;
  auto s = build_degenerate_oscillators(a, a, 1);
  const std::size_t dS = a.fock_dim;
  const Eigen::Index i10 = static_cast<Eigen::Index>(dS), i01 = 1;

  // Restricted to {|1,0>, |0,1>}, the rotation angle is T-independent.
  Matrix h0 = s.h0().matrix(), v = s.coupling().matrix();
  std::vector<double> ref;
  for (double T : {20.0, 40.0, 80.0}) {
    Matrix h(2, 2);
    h << h0(i10, i10) + v(i10, i10) / T, h0(i10, i01) + v(i10, i01) / T,
        h0(i01, i10) + v(i01, i10) / T, h0(i01, i01) + v(i01, i01) / T;
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Eigen::VectorXcd phase = (es.eigenvalues().cast<cplx>() * cplx(0, -T)).array().exp();
    Matrix U = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
    double c = std::abs(U(0, 0)), sn = std::abs(U(1, 0));
    CHECK(c == doctest::Approx(std::cos(0.5)).epsilon(1e-12));
    CHECK(sn == doctest::Approx(std::sin(0.5)).epsilon(1e-12));
    ref.push_back(c);
  }
  CHECK(std::abs(ref[0] - ref[2]) < 1e-6);

  // Full simulation keeps off-resonant Fock couplings; the drift they cause is O(1/T).
  double first = -1;
  for (double T : {20.0, 40.0, 80.0}) {
    auto r = protect::run_protective(s, evolve::CouplingProfile::rectangular(T), {1, 0});
    const auto& amp = r.final_state.amplitudes();
    CHECK(std::abs(amp(i10)) == doctest::Approx(std::cos(0.5)).epsilon(1e-3));
    CHECK(std::abs(amp(i01)) == doctest::Approx(std::sin(0.5)).epsilon(1e-3));
    if (first < 0) first = std::abs(amp(i10));
    CHECK(std::abs(std::abs(amp(i10)) - first) < 1e-3);
  }
}

TEST_CASE("degenerate spin oscillator") {
  OscillatorParams p;
  p.fock_dim = 8;
  CHECK_NOTHROW(build_degenerate_spin_oscillator(p, 0.5, {1, 0, 0}));
  CHECK_THROWS_AS(build_degenerate_spin_oscillator(p, 0.6, {1, 0, 0}), PhysicsError);

  // |0,+> is index 0 and |1,-> is index 1*2+1.
  auto z = build_degenerate_spin_oscillator(p, 0.5, {0, 0, 1});
  CHECK(std::abs(z.h0().matrix()(0, 0) - z.h0().matrix()(3, 3)) < 1e-12);
  CHECK(std::abs(z.coupling().matrix()(0, 3)) < 1e-14);
  CHECK_NOTHROW(perturbative_prediction(z));

  auto x = build_degenerate_spin_oscillator(p, 0.5, {1, 0, 0});
  CHECK(std::abs(x.coupling().matrix()(0, 3)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(perturbative_prediction(x), DegeneracyError);
}

TEST_CASE("perturbative prediction") {
  auto s = build_aav_spin(SpinFieldParams::with_angle(1, 1, 0.1, std::numbers::pi / 3), packet(50.0, 800.0));
  auto pp = perturbative_prediction(s);
  CHECK(pp.shift == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(pp.correction_coefficient > 0.0);

  // Q_S commuting with H_S: the shift is the eigenvalue and there is no admixture.
  auto aligned = build_aav_spin(SpinFieldParams::with_angle(1, 1, 0.1, 0.0), packet(50.0, 800.0));
  auto pa = perturbative_prediction(aligned);
  CHECK(pa.shift == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(pa.correction_coefficient == doctest::Approx(0.0));
}

TEST_CASE("custom scenarios and validation") {
  CustomRecipe r;
  r.apparatus = qcore::HilbertFactor::fock(kApparatus, 2);
  r.system = qcore::HilbertFactor::spin(kSystem);
  r.h_apparatus = Matrix::Zero(2, 2);
  r.q_apparatus = Matrix::Identity(2, 2);
  r.pointer = Matrix::Identity(2, 2);
  r.h_system = Matrix::Zero(2, 2);
  r.h_system(0, 0) = 1.0;
  r.h_system(1, 1) = -1.0;
  r.q_system = Matrix::Zero(2, 2);
  r.q_system(0, 1) = r.q_system(1, 0) = 1.0;
  r.initial_apparatus = Eigen::VectorXcd::Unit(2, 0);
  r.initial_system = Eigen::VectorXcd::Unit(2, 1);
  auto s = build_custom(r);
  CHECK_NOTHROW(validate(s));

  r.initial_system = Eigen::VectorXcd::Ones(2) / std::sqrt(2.0);
  CHECK_THROWS_AS(validate(build_custom(r)), PhysicsError);
  r.tags = {"non-eigenstate-demo"};
  CHECK_NOTHROW(validate(build_custom(r)));

  r.q_system(0, 1) = cplx(0, 1);
  CHECK_THROWS_AS(build_custom(r), NumericError);
  r.q_system(0, 1) = 1.0;
  r.system.label = kApparatus;
  CHECK_THROWS_AS(build_custom(r), ConfigError);
}
