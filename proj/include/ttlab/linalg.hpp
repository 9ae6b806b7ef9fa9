#pragma once

#include <cstdint>
#include <vector>

#include "ttlab/rational.hpp"

namespace ttlab::lin {

using QVec = std::vector<Rational>;
using QMat = std::vector<QVec>;  // list of rows
using DVec = std::vector<double>;

DVec to_double(const QVec& v);

// Reduced row echelon form in place; returns pivot column per pivot row.
std::vector<int> rref(QMat& a);

int rank(QMat a);

// Basis of {x : a x = 0}, a acting on column vectors of length cols.
// Returned as basis *rows*.
QMat kernel_basis(QMat a, int cols);

// Determinant of a square matrix.
Rational det(QMat a);

// Inverse; false when singular.
bool invert(QMat a, QMat* out);

// Solve a x = b (any solution); false when inconsistent.
bool solve(QMat a, QVec b, QVec* x);

// v in the row span of basis.
bool in_span(const QMat& basis, const QVec& v);

// Every row of sub lies in the row span of sup.
bool span_subset(const QMat& sub, const QMat& sup);

// Exact two-phase simplex for  max c.y  s.t.  A y = b, y >= 0.
struct LpResult {
  bool feasible = false;
  bool unbounded = false;
  Rational objective;
  QVec y;
};
LpResult lp_max(const QVec& c, const QMat& a, const QVec& b);

// Strict feasibility of span(basis rows) with the open positive orthant:
// exists x in span with every coordinate > 0. Witness is normalized to
// total mass one when found.
bool positive_point_in_span(const QMat& basis, QVec* witness = nullptr);

// Nonnegative integer matrices acting on branch-weight space; the carrying
// matrices live here. Multiplication is overflow-checked.
struct IMat {
  int n = 0;
  std::vector<std::int64_t> a;  // row-major

  IMat() = default;
  explicit IMat(int dim) : n(dim), a(static_cast<std::size_t>(dim) * dim, 0) {}
  static IMat identity(int dim);

  std::int64_t& at(int r, int c) { return a[static_cast<std::size_t>(r) * n + c]; }
  std::int64_t at(int r, int c) const { return a[static_cast<std::size_t>(r) * n + c]; }

  friend IMat operator*(const IMat& lhs, const IMat& rhs);
  bool operator==(const IMat& other) const = default;

  QVec apply(const QVec& v) const;
  DVec apply(const DVec& v) const;
  // transpose action u^T -> (M^T u)
  DVec apply_transpose(const DVec& v) const;
  QVec apply_transpose(const QVec& v) const;
  IMat transposed() const;
  QMat to_rational() const;
  std::vector<double> to_double() const;
};

// Dense double helpers for the float lane.
struct DMat {
  int rows = 0, cols = 0;
  std::vector<double> a;
  DMat() = default;
  DMat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
  double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

// PLU decomposition based solve / determinant; false when (numerically) singular.
bool lu_solve(DMat a, DVec b, DVec* x);
double lu_det(DMat a);

// Orthonormalize the rows of m (modified Gram-Schmidt); near-zero rows dropped.
std::vector<DVec> orthonormal_rows(const std::vector<DVec>& m, double eps = 1e-12);

}  // namespace ttlab::lin
