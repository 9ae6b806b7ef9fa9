// AVX2 variants of the double kernels. Compiled with -mavx2 and reached only
// through the dispatch table, so the binary still runs on pre-AVX2 hardware.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstddef>
#include <limits>

#include "ttlab/kernels.hpp"

namespace ttlab::simd {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return hsum(acc) + tail;
}

double sum_avx2(const double* a, std::size_t n) {
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double tail = 0.0;
  for (; i < n; ++i) tail += a[i];
  return hsum(acc) + tail;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  __m256d va = _mm256_set1_pd(alpha);
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(double alpha, double* x, std::size_t n) {
  std::size_t i = 0;
  __m256d va = _mm256_set1_pd(alpha);
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] *= alpha;
}

void matvec_avx2(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_avx2(a + r * cols, x, cols);
}

double min_ratio_avx2(const double* num, const double* den, std::size_t n) {
  std::size_t i = 0;
  __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  for (; i + 4 <= n; i += 4) {
    best = _mm256_min_pd(best, _mm256_div_pd(_mm256_loadu_pd(num + i), _mm256_loadu_pd(den + i)));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, best);
  double out = std::min(std::min(lane[0], lane[1]), std::min(lane[2], lane[3]));
  for (; i < n; ++i) out = std::min(out, num[i] / den[i]);
  return out;
}

double max_abs_ratio_avx2(const double* a, const double* den, std::size_t n) {
  std::size_t i = 0;
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d best = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    __m256d va = _mm256_andnot_pd(sign_mask, _mm256_loadu_pd(a + i));
    best = _mm256_max_pd(best, _mm256_div_pd(va, _mm256_loadu_pd(den + i)));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, best);
  double out = std::max(std::max(lane[0], lane[1]), std::max(lane[2], lane[3]));
  for (; i < n; ++i) out = std::max(out, std::fabs(a[i]) / den[i]);
  return out;
}

}  // namespace

const KernelTable kAvx2 = {
    dot_avx2,    sum_avx2,       axpy_avx2,          scale_avx2,
    matvec_avx2, min_ratio_avx2, max_abs_ratio_avx2,
};

}  // namespace ttlab::simd

#endif
