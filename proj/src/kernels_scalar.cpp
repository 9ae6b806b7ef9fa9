#include <cmath>
#include <cstddef>
#include <limits>

#include "ttlab/kernels.hpp"

namespace ttlab::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void matvec_scalar(const double* a, std::size_t rows, std::size_t cols, const double* x,
                   double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_scalar(a + r * cols, x, cols);
}

double min_ratio_scalar(const double* num, const double* den, std::size_t n) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double q = num[i] / den[i];
    if (q < best) best = q;
  }
  return best;
}

double max_abs_ratio_scalar(const double* a, const double* den, std::size_t n) {
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double q = std::fabs(a[i]) / den[i];
    if (q > best) best = q;
  }
  return best;
}

}  // namespace

const KernelTable kScalar = {
    dot_scalar,    sum_scalar,       axpy_scalar,          scale_scalar,
    matvec_scalar, min_ratio_scalar, max_abs_ratio_scalar,
};

}  // namespace ttlab::simd
