#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "neurocactus/kernels.hpp"

namespace neurocactus::kernels {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

}  // namespace

void rhs_avx2(const double* a, std::size_t ld, std::size_t n, const double* x, double leak,
              double theta, const double* bu, double* out) {
  // Row dot products, 4 rows at a time so x is loaded once per column block.
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    __m256d s2 = _mm256_setzero_pd(), s3 = _mm256_setzero_pd();
    const double* r0 = a + i * ld;
    const double* r1 = r0 + ld;
    const double* r2 = r1 + ld;
    const double* r3 = r2 + ld;
    for (std::size_t j = 0; j < ld; j += 4) {
      const __m256d xv = _mm256_loadu_pd(x + j);
      s0 = _mm256_fmadd_pd(_mm256_loadu_pd(r0 + j), xv, s0);
      s1 = _mm256_fmadd_pd(_mm256_loadu_pd(r1 + j), xv, s1);
      s2 = _mm256_fmadd_pd(_mm256_loadu_pd(r2 + j), xv, s2);
      s3 = _mm256_fmadd_pd(_mm256_loadu_pd(r3 + j), xv, s3);
    }
    __m256d s = _mm256_set_pd(hsum(s3), hsum(s2), hsum(s1), hsum(s0));
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    const __m256d mag = _mm256_andnot_pd(sign_mask, s);
    const __m256d keep = _mm256_cmp_pd(mag, _mm256_set1_pd(theta), _CMP_GT_OQ);
    s = _mm256_and_pd(s, keep);
    const __m256d xv = _mm256_loadu_pd(x + i);
    __m256d r = _mm256_mul_pd(_mm256_set1_pd(-leak), xv);
    r = _mm256_add_pd(r, s);
    r = _mm256_add_pd(r, _mm256_loadu_pd(bu + i));
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) {
    const double* row = a + i * ld;
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t j = 0; j < ld; j += 4) {
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(x + j), acc);
    }
    const double s = hsum(acc);
    const double g = std::abs(s) > theta ? s : 0.0;
    out[i] = -leak * x[i] + g + bu[i];
  }
}

void hebbian_avx2(std::size_t count, const double* a, const double* decay, const double* sign,
                  const double* phi, const double* lo, const double* hi, double* out) {
  std::size_t k = 0;
  // mul + add (no fma) so results match the scalar reference bit for bit.
  for (; k + 4 <= count; k += 4) {
    __m256d v = _mm256_mul_pd(_mm256_loadu_pd(decay + k), _mm256_loadu_pd(a + k));
    v = _mm256_add_pd(v, _mm256_mul_pd(_mm256_loadu_pd(sign + k), _mm256_loadu_pd(phi + k)));
    v = _mm256_max_pd(v, _mm256_loadu_pd(lo + k));
    v = _mm256_min_pd(v, _mm256_loadu_pd(hi + k));
    _mm256_storeu_pd(out + k, v);
  }
  for (; k < count; ++k) {
    const double v = decay[k] * a[k] + sign[k] * phi[k];
    out[k] = std::min(std::max(v, lo[k]), hi[k]);
  }
}

}  // namespace neurocactus::kernels
