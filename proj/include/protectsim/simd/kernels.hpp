#pragma once

// Complex double-precision inner loops used by qcore and the propagator.
//
// Every kernel has a scalar reference implementation and, on x86-64 builds,
// an AVX2/FMA variant. The variant is chosen once at startup from CPUID and
// can be pinned with PROTECTSIM_SIMD=scalar|avx2. Variants agree to rounding
// (summation order differs), not bit-for-bit.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace protectsim::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  // sum_i conj(a_i) * b_i
  cplx (*dot_conj)(const cplx* a, const cplx* b, std::size_t n);
  // sum_i |a_i|^2
  double (*norm_sq)(const cplx* a, std::size_t n);
  // y += alpha * x
  void (*axpy)(cplx alpha, const cplx* x, cplx* y, std::size_t n);
  // v_i *= w_i
  void (*hadamard)(cplx* v, const cplx* w, std::size_t n);
  // out_i = |a_i|^2
  void (*abs_sq)(const cplx* a, double* out, std::size_t n);
};

const KernelTable& scalar_kernels();
// nullptr when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();

bool isa_available(Isa isa);
Isa active_isa();
// Pins the dispatch target; throws std::invalid_argument if unavailable.
void set_active_isa(Isa isa);
std::string_view isa_name(Isa isa);

const KernelTable& active();

// Span front ends over the active table.
cplx dot_conj(std::span<const cplx> a, std::span<const cplx> b);
double norm_sq(std::span<const cplx> a);
void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);
void hadamard(std::span<cplx> v, std::span<const cplx> w);
void abs_sq(std::span<const cplx> a, std::span<double> out);

// y = A x for a column-major rows x cols matrix.
void matvec(std::span<const cplx> a, std::size_t rows, std::size_t cols,
            std::span<const cplx> x, std::span<cplx> y);
// y = A^H x for a column-major rows x cols matrix (y has cols entries).
void matvec_adjoint(std::span<const cplx> a, std::size_t rows, std::size_t cols,
                    std::span<const cplx> x, std::span<cplx> y);

}  // namespace protectsim::simd
