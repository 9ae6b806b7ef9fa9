#pragma once

#include <cstddef>
#include <string>

namespace ttlab::simd {

// Double-precision kernels behind the float-lane hot loops (power iteration,
// Monte Carlo sampling, transfer-operator evolution). Scalar reference
// implementations and AVX2 variants share one table; the backend is picked
// once at startup from CPU features and can be forced for equivalence tests.

struct KernelTable {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
  // y = A x for row-major A (rows x cols).
  void (*matvec)(const double*, std::size_t, std::size_t, const double*, double*);
  // min_i num[i]/den[i]; den must be positive throughout.
  double (*min_ratio)(const double*, const double*, std::size_t);
  // max_i |a[i]|/den[i]; the sup norm relative to a positive reference.
  double (*max_abs_ratio)(const double*, const double*, std::size_t);
};

extern const KernelTable kScalar;
#if defined(__x86_64__) || defined(_M_X64)
extern const KernelTable kAvx2;
#endif

// Active table (dispatch resolved at first use).
const KernelTable& active();
std::string active_name();

// Test hook: force a specific backend ("scalar", "avx2", "auto").
void force_backend(const std::string& name);

inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline double sum(const double* a, std::size_t n) { return active().sum(a, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}
inline void scale(double alpha, double* x, std::size_t n) { active().scale(alpha, x, n); }
inline void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x,
                   double* y) {
  active().matvec(a, rows, cols, x, y);
}
inline double min_ratio(const double* num, const double* den, std::size_t n) {
  return active().min_ratio(num, den, n);
}
inline double max_abs_ratio(const double* a, const double* den, std::size_t n) {
  return active().max_abs_ratio(a, den, n);
}

}  // namespace ttlab::simd
