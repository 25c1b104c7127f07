#include <doctest.h>

#include <random>
#include <vector>

#include "protectsim/simd/kernels.hpp"

using namespace protectsim::simd;

namespace {

std::vector<cplx> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> d;
  std::vector<cplx> v(n);
  for (auto& x : v) x = {d(rng), d(rng)};
  return v;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Plain loops written independently of the library.
cplx ref_dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

void check_table(const KernelTable& k) {
  std::mt19937_64 rng(11);
  for (std::size_t n = 0; n < 70; ++n) {
    const auto a = random_vec(rng, n), b = random_vec(rng, n);
    CHECK(rel(k.dot_conj(a.data(), b.data(), n), ref_dot(a, b)) < 1e-13);
    double ns = 0.0;
    for (auto x : a) ns += std::norm(x);
    CHECK(std::abs(k.norm_sq(a.data(), n) - ns) < 1e-12 * std::max(1.0, ns));

    auto y = b;
    const cplx alpha{0.3, -1.7};
    k.axpy(alpha, a.data(), y.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(rel(y[i], b[i] + alpha * a[i]) < 1e-14);

    auto v = a;
    k.hadamard(v.data(), b.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(rel(v[i], a[i] * b[i]) < 1e-14);

    std::vector<double> out(n, -1.0);
    k.abs_sq(a.data(), out.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(out[i] - std::norm(a[i])) < 1e-14 * std::max(1.0, out[i]));
  }
}

}  // namespace

TEST_CASE("scalar kernels match plain loops") { check_table(scalar_kernels()); }

TEST_CASE("avx2 kernels match plain loops") {
  if (!avx2_kernels()) {
    MESSAGE("AVX2 unavailable on this build/CPU; skipped");
    return;
  }
  check_table(*avx2_kernels());
}

TEST_CASE("avx2 and scalar variants agree") {
  if (!avx2_kernels()) return;
  const KernelTable& s = scalar_kernels();
  const KernelTable& v = *avx2_kernels();
  std::mt19937_64 rng(5);
  for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 31u, 256u, 1023u}) {
    const auto a = random_vec(rng, n), b = random_vec(rng, n);
    CHECK(rel(v.dot_conj(a.data(), b.data(), n), s.dot_conj(a.data(), b.data(), n)) < 1e-12);
    CHECK(std::abs(v.norm_sq(a.data(), n) - s.norm_sq(a.data(), n)) < 1e-12 * s.norm_sq(a.data(), n));
    auto y1 = b, y2 = b;
    s.axpy({0.5, 0.25}, a.data(), y1.data(), n);
    v.axpy({0.5, 0.25}, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(rel(y1[i], y2[i]) < 1e-15);
  }
}

TEST_CASE("dispatch selection") {
  CHECK(isa_available(Isa::scalar));
  const Isa before = active_isa();
  set_active_isa(Isa::scalar);
  CHECK(active().isa == Isa::scalar);
  CHECK(isa_name(Isa::scalar) == "scalar");
  if (isa_available(Isa::avx2)) {
    set_active_isa(Isa::avx2);
    CHECK(active().isa == Isa::avx2);
  } else {
    CHECK_THROWS_AS(set_active_isa(Isa::avx2), std::invalid_argument);
  }
  set_active_isa(before);
}

TEST_CASE("matvec and adjoint against dense loops under both ISAs") {
  std::mt19937_64 rng(3);
  const std::size_t rows = 13, cols = 9;
  const auto a = random_vec(rng, rows * cols), x = random_vec(rng, cols), z = random_vec(rng, rows);
  const Isa before = active_isa();
  for (Isa isa : {Isa::scalar, Isa::avx2}) {
    if (!isa_available(isa)) continue;
    set_active_isa(isa);
    std::vector<cplx> y(rows), w(cols);
    matvec(a, rows, cols, x, y);
    matvec_adjoint(a, rows, cols, z, w);
    for (std::size_t r = 0; r < rows; ++r) {
      cplx s{};
      for (std::size_t c = 0; c < cols; ++c) s += a[c * rows + r] * x[c];
      CHECK(rel(y[r], s) < 1e-13);
    }
    for (std::size_t c = 0; c < cols; ++c) {
      cplx s{};
      for (std::size_t r = 0; r < rows; ++r) s += std::conj(a[c * rows + r]) * z[r];
      CHECK(rel(w[c], s) < 1e-13);
    }
  }
  set_active_isa(before);
}
