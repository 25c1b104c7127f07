// Built with -mavx2 -mfma; only reached through the runtime dispatcher.
#include <immintrin.h>

#include "kernels_impl.hpp"

namespace protectsim::simd::detail {
namespace {

// One __m256d holds two complex numbers as [re0, im0, re1, im1].
inline __m256d load2(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store2(cplx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }
inline __m256d swap_re_im(__m256d v) { return _mm256_permute_pd(v, 0b0101); }

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

cplx dot_conj_avx2(const cplx* a, const cplx* b, std::size_t n) {
  __m256d rr0 = _mm256_setzero_pd(), rr1 = _mm256_setzero_pd();
  __m256d ri0 = _mm256_setzero_pd(), ri1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a0 = load2(a + i), a1 = load2(a + i + 2);
    const __m256d b0 = load2(b + i), b1 = load2(b + i + 2);
    rr0 = _mm256_fmadd_pd(a0, b0, rr0);
    rr1 = _mm256_fmadd_pd(a1, b1, rr1);
    ri0 = _mm256_fmadd_pd(a0, swap_re_im(b0), ri0);
    ri1 = _mm256_fmadd_pd(a1, swap_re_im(b1), ri1);
  }
  for (; i + 2 <= n; i += 2) {
    const __m256d a0 = load2(a + i), b0 = load2(b + i);
    rr0 = _mm256_fmadd_pd(a0, b0, rr0);
    ri0 = _mm256_fmadd_pd(a0, swap_re_im(b0), ri0);
  }
  const __m256d rr = _mm256_add_pd(rr0, rr1);
  // ri lanes: [ar*bi, ai*br, ...]; imaginary part is even lanes minus odd lanes.
  const __m256d ri = _mm256_add_pd(ri0, ri1);
  const __m256d sign = _mm256_setr_pd(1.0, -1.0, 1.0, -1.0);
  double re = hsum(rr);
  double im = hsum(_mm256_mul_pd(ri, sign));
  for (; i < n; ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {re, im};
}

double norm_sq_avx2(const cplx* a, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a0 = load2(a + i), a1 = load2(a + i + 2);
    s0 = _mm256_fmadd_pd(a0, a0, s0);
    s1 = _mm256_fmadd_pd(a1, a1, s1);
  }
  for (; i + 2 <= n; i += 2) {
    const __m256d a0 = load2(a + i);
    s0 = _mm256_fmadd_pd(a0, a0, s0);
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  return s;
}

void axpy_avx2(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = load2(x + i);
    const __m256d t = _mm256_mul_pd(ai, swap_re_im(xv));
    const __m256d prod = _mm256_fmaddsub_pd(ar, xv, t);
    store2(y + i, _mm256_add_pd(load2(y + i), prod));
  }
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] = {y[i].real() + alpha.real() * xr - alpha.imag() * xi,
            y[i].imag() + alpha.real() * xi + alpha.imag() * xr};
  }
}

void hadamard_avx2(cplx* v, const cplx* w, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vv = load2(v + i);
    const __m256d wv = load2(w + i);
    const __m256d vr = _mm256_movedup_pd(vv);
    const __m256d vi = _mm256_permute_pd(vv, 0b1111);
    const __m256d t = _mm256_mul_pd(vi, swap_re_im(wv));
    store2(v + i, _mm256_fmaddsub_pd(vr, wv, t));
  }
  for (; i < n; ++i) {
    const double vr = v[i].real(), vi = v[i].imag();
    const double wr = w[i].real(), wi = w[i].imag();
    v[i] = {vr * wr - vi * wi, vr * wi + vi * wr};
  }
}

void abs_sq_avx2(const cplx* a, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p = load2(a + i), q = load2(a + i + 2);
    const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(p, p), _mm256_mul_pd(q, q));
    _mm256_storeu_pd(out + i, _mm256_permute4x64_pd(h, 0b11011000));
  }
  for (; i < n; ++i) out[i] = a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{Isa::avx2,  dot_conj_avx2, norm_sq_avx2,
                                 axpy_avx2,  hadamard_avx2, abs_sq_avx2};
  return table;
}

}  // namespace protectsim::simd::detail
