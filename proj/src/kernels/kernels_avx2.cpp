#include "toriclab/kernels.hpp"

#include <cmath>
#include <limits>

#if defined(__x86_64__) || defined(_M_X64)
#define TORICLAB_X86 1
#include <immintrin.h>
#else
#define TORICLAB_X86 0
#endif

namespace toriclab::kernels::avx2 {

#if TORICLAB_X86

#define TORICLAB_AVX2 __attribute__((target("avx2,fma")))

namespace {

// exp on 4 lanes: Cody-Waite reduction x = n ln2 + r, |r| <= ln2/2, then a
// degree-12 Taylor polynomial (truncation < 2e-16 relative). Inputs below
// -708 flush to zero instead of producing subnormals.
TORICLAB_AVX2 inline __m256d exp4(__m256d x) {
  const __m256d hi = _mm256_set1_pd(709.0);
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  __m256d p = _mm256_set1_pd(1.0 / 479001600.0);
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  // 2^n via the 1.5*2^52 magic-number trick; n + 1023 lies in [1, 2046].
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);
  __m256d biased = _mm256_add_pd(_mm256_add_pd(n, _mm256_set1_pd(1023.0)), magic);
  __m256i bits = _mm256_slli_epi64(_mm256_castpd_si256(biased), 52);
  __m256d scale = _mm256_castsi256_pd(bits);

  __m256d y = _mm256_mul_pd(p, scale);
  return _mm256_blendv_pd(y, _mm256_setzero_pd(), underflow);
}

TORICLAB_AVX2 inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

TORICLAB_AVX2 inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, sh));
}

}  // namespace

TORICLAB_AVX2 double max_affine(const double* base, const double* t, std::size_t n, double slope) {
  const __m256d s = _mm256_set1_pd(slope);
  __m256d acc = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_fmadd_pd(s, _mm256_loadu_pd(t + i), _mm256_loadu_pd(base + i));
    acc = _mm256_max_pd(acc, v);
  }
  double m = hmax(acc);
  for (; i < n; ++i) m = std::max(m, std::fma(slope, t[i], base[i]));
  return m;
}

TORICLAB_AVX2 double sum_exp_affine(const double* base, const double* t, std::size_t n,
                                    double slope, double shift) {
  const __m256d s = _mm256_set1_pd(slope);
  const __m256d sh = _mm256_set1_pd(shift);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_fmadd_pd(s, _mm256_loadu_pd(t + i), _mm256_loadu_pd(base + i));
    acc = _mm256_add_pd(acc, exp4(_mm256_sub_pd(v, sh)));
  }
  double sum = hsum(acc);
  for (; i < n; ++i) sum += std::exp(std::fma(slope, t[i], base[i]) - shift);
  return sum;
}

TORICLAB_AVX2 void accumulate_exp_affine(const double* base, const double* t, std::size_t n,
                                         double slope, double shift, double scale, double* out) {
  const __m256d s = _mm256_set1_pd(slope);
  const __m256d sh = _mm256_set1_pd(shift);
  const __m256d sc = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_fmadd_pd(s, _mm256_loadu_pd(t + i), _mm256_loadu_pd(base + i));
    __m256d e = exp4(_mm256_sub_pd(v, sh));
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(sc, e, _mm256_loadu_pd(out + i)));
  }
  for (; i < n; ++i) out[i] += scale * std::exp(std::fma(slope, t[i], base[i]) - shift);
}

TORICLAB_AVX2 double dot3(const double* a, const double* b, const double* c, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(ab, _mm256_loadu_pd(c + i), acc);
  }
  double sum = hsum(acc);
  for (; i < n; ++i) sum += a[i] * b[i] * c[i];
  return sum;
}

#else  // !TORICLAB_X86: forward to the scalar reference.

double max_affine(const double* base, const double* t, std::size_t n, double slope) {
  return scalar::max_affine(base, t, n, slope);
}
double sum_exp_affine(const double* base, const double* t, std::size_t n, double slope,
                      double shift) {
  return scalar::sum_exp_affine(base, t, n, slope, shift);
}
void accumulate_exp_affine(const double* base, const double* t, std::size_t n, double slope,
                           double shift, double scale, double* out) {
  scalar::accumulate_exp_affine(base, t, n, slope, shift, scale, out);
}
double dot3(const double* a, const double* b, const double* c, std::size_t n) {
  return scalar::dot3(a, b, c, n);
}

#endif

}  // namespace toriclab::kernels::avx2
