#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_impl.hpp"

namespace protectsim::simd {
namespace {

bool cpu_has_avx2() {
#if defined(PROTECTSIM_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() {
  Isa isa = cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
  if (const char* env = std::getenv("PROTECTSIM_SIMD")) {
    const std::string want(env);
    if (want == "scalar") isa = Isa::scalar;
  }
  return isa;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

const KernelTable& scalar_kernels() { return detail::scalar_table(); }

const KernelTable* avx2_kernels() {
#if defined(PROTECTSIM_BUILD_AVX2)
  static const bool ok = cpu_has_avx2();
  return ok ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

bool isa_available(Isa isa) { return isa == Isa::scalar || avx2_kernels() != nullptr; }

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("SIMD target not available: " + std::string(isa_name(isa)));
  }
  current().store(isa, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

const KernelTable& active() {
  if (active_isa() == Isa::avx2) {
    if (const KernelTable* t = avx2_kernels()) return *t;
  }
  return scalar_kernels();
}

cplx dot_conj(std::span<const cplx> a, std::span<const cplx> b) {
  return active().dot_conj(a.data(), b.data(), a.size());
}

double norm_sq(std::span<const cplx> a) { return active().norm_sq(a.data(), a.size()); }

void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

void hadamard(std::span<cplx> v, std::span<const cplx> w) {
  active().hadamard(v.data(), w.data(), v.size());
}

void abs_sq(std::span<const cplx> a, std::span<double> out) {
  active().abs_sq(a.data(), out.data(), a.size());
}

void matvec(std::span<const cplx> a, std::size_t rows, std::size_t cols,
            std::span<const cplx> x, std::span<cplx> y) {
  const KernelTable& k = active();
  for (std::size_t i = 0; i < rows; ++i) y[i] = 0.0;
  for (std::size_t j = 0; j < cols; ++j) {
    if (x[j] == cplx{}) continue;
    k.axpy(x[j], a.data() + j * rows, y.data(), rows);
  }
}

void matvec_adjoint(std::span<const cplx> a, std::size_t rows, std::size_t cols,
                    std::span<const cplx> x, std::span<cplx> y) {
  const KernelTable& k = active();
  for (std::size_t j = 0; j < cols; ++j) {
    y[j] = k.dot_conj(a.data() + j * rows, x.data(), rows);
  }
}

}  // namespace protectsim::simd
