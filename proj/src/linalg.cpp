#include "ttlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "ttlab/error.hpp"

namespace ttlab::lin {

DVec to_double(const QVec& v) {
  DVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].to_double();
  return out;
}

std::vector<int> rref(QMat& a) {
  std::vector<int> pivots;
  if (a.empty()) return pivots;
  const int rows = static_cast<int>(a.size());
  const int cols = static_cast<int>(a[0].size());
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int pivot = -1;
    for (int i = r; i < rows; ++i) {
      if (!a[i][c].is_zero()) {
        pivot = i;
        break;
      }
    }
    if (pivot < 0) continue;
    std::swap(a[r], a[pivot]);
    Rational inv = Rational(1) / a[r][c];
    for (int j = c; j < cols; ++j) a[r][j] *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || a[i][c].is_zero()) continue;
      Rational f = a[i][c];
      for (int j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

int rank(QMat a) { return static_cast<int>(rref(a).size()); }

QMat kernel_basis(QMat a, int cols) {
  if (a.empty()) {
    QMat basis;
    for (int j = 0; j < cols; ++j) {
      QVec e(cols, Rational(0));
      e[j] = Rational(1);
      basis.push_back(std::move(e));
    }
    return basis;
  }
  std::vector<int> pivots = rref(a);
  std::vector<bool> is_pivot(cols, false);
  for (int c : pivots) is_pivot[c] = true;
  QMat basis;
  for (int free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    QVec v(cols, Rational(0));
    v[free] = Rational(1);
    for (std::size_t pr = 0; pr < pivots.size(); ++pr) {
      v[pivots[pr]] = -a[pr][free];
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

Rational det(QMat a) {
  const int n = static_cast<int>(a.size());
  Rational d(1);
  for (int c = 0; c < n; ++c) {
    int pivot = -1;
    for (int i = c; i < n; ++i) {
      if (!a[i][c].is_zero()) {
        pivot = i;
        break;
      }
    }
    if (pivot < 0) return Rational(0);
    if (pivot != c) {
      std::swap(a[c], a[pivot]);
      d = -d;
    }
    d *= a[c][c];
    Rational inv = Rational(1) / a[c][c];
    for (int i = c + 1; i < n; ++i) {
      if (a[i][c].is_zero()) continue;
      Rational f = a[i][c] * inv;
      for (int j = c; j < n; ++j) a[i][j] -= f * a[c][j];
    }
  }
  return d;
}

bool invert(QMat a, QMat* out) {
  const int n = static_cast<int>(a.size());
  for (int i = 0; i < n; ++i) {
    a[i].resize(2 * n, Rational(0));
    a[i][n + i] = Rational(1);
  }
  std::vector<int> pivots = rref(a);
  if (static_cast<int>(pivots.size()) != n || pivots.back() != n - 1) return false;
  out->assign(n, QVec(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) (*out)[i][j] = a[i][n + j];
  }
  return true;
}

bool solve(QMat a, QVec b, QVec* x) {
  const int rows = static_cast<int>(a.size());
  const int cols = rows ? static_cast<int>(a[0].size()) : 0;
  for (int i = 0; i < rows; ++i) a[i].push_back(b[i]);
  std::vector<int> pivots = rref(a);
  // Inconsistent when a pivot lands in the augmented column.
  if (!pivots.empty() && pivots.back() == cols) return false;
  x->assign(cols, Rational(0));
  for (std::size_t pr = 0; pr < pivots.size(); ++pr) {
    (*x)[pivots[pr]] = a[pr][cols];
  }
  return true;
}

bool in_span(const QMat& basis, const QVec& v) {
  if (basis.empty()) {
    for (const auto& e : v) {
      if (!e.is_zero()) return false;
    }
    return true;
  }
  QMat stacked = basis;
  int r0 = rank(stacked);
  stacked.push_back(v);
  return rank(stacked) == r0;
}

bool span_subset(const QMat& sub, const QMat& sup) {
  for (const auto& row : sub) {
    if (!in_span(sup, row)) return false;
  }
  return true;
}

namespace {

// Bland's rule tableau simplex on max c.y, A y = b, y >= 0.
struct Tableau {
  int m, n;          // constraints, structural+artificial columns
  QMat t;            // m+1 rows, n+1 cols; last row objective, last col rhs
  std::vector<int> basis;

  void pivot(int row, int col) {
    Rational inv = Rational(1) / t[row][col];
    for (int j = 0; j <= n; ++j) t[row][j] *= inv;
    for (int i = 0; i <= m; ++i) {
      if (i == row || t[i][col].is_zero()) continue;
      Rational f = t[i][col];
      for (int j = 0; j <= n; ++j) t[i][j] -= f * t[row][j];
    }
    basis[row] = col;
  }

  // Returns false when unbounded.
  bool run() {
    for (;;) {
      int col = -1;
      for (int j = 0; j < n; ++j) {
        if (t[m][j] > Rational(0)) {
          col = j;
          break;
        }
      }
      if (col < 0) return true;
      int row = -1;
      for (int i = 0; i < m; ++i) {
        if (t[i][col] > Rational(0)) {
          if (row < 0) {
            row = i;
            continue;
          }
          Rational lhs = t[i][n] * t[row][col];
          Rational rhs = t[row][n] * t[i][col];
          if (lhs < rhs || (lhs == rhs && basis[i] < basis[row])) row = i;
        }
      }
      if (row < 0) return false;
      pivot(row, col);
    }
  }
};

}  // namespace

LpResult lp_max(const QVec& c, const QMat& a, const QVec& b) {
  LpResult res;
  const int m = static_cast<int>(a.size());
  const int n = m ? static_cast<int>(a[0].size()) : static_cast<int>(c.size());

  Tableau tab;
  tab.m = m;
  tab.n = n + m;  // artificials appended
  tab.t.assign(m + 1, QVec(tab.n + 1, Rational(0)));
  tab.basis.resize(m);
  for (int i = 0; i < m; ++i) {
    int sign = b[i] >= Rational(0) ? 1 : -1;
    for (int j = 0; j < n; ++j) tab.t[i][j] = Rational(sign) * a[i][j];
    tab.t[i][n + i] = Rational(1);
    tab.t[i][tab.n] = Rational(sign) * b[i];
    tab.basis[i] = n + i;
  }
  // Phase 1: maximize -sum(artificials).
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= tab.n; ++j) {
      if (j >= n && j < n + m) continue;
      tab.t[m][j] += tab.t[i][j];
    }
  }
  tab.run();
  if (!tab.t[m][tab.n].is_zero()) return res;  // infeasible
  // Drive leftover artificials out of the basis when possible.
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] < n) continue;
    int col = -1;
    for (int j = 0; j < n; ++j) {
      if (!tab.t[i][j].is_zero()) {
        col = j;
        break;
      }
    }
    if (col >= 0) tab.pivot(i, col);
  }
  // Phase 2 objective.
  for (int j = 0; j <= tab.n; ++j) tab.t[m][j] = Rational(0);
  for (int j = 0; j < n; ++j) tab.t[m][j] = c[j];
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] >= n) continue;
    Rational f = tab.t[m][tab.basis[i]];
    if (f.is_zero()) continue;
    for (int j = 0; j <= tab.n; ++j) tab.t[m][j] -= f * tab.t[i][j];
  }
  // Zero the columns of non-basic artificials so they never re-enter.
  for (int j = n; j < tab.n; ++j) {
    bool basic = false;
    for (int r = 0; r < m; ++r) {
      if (tab.basis[r] == j) basic = true;
    }
    if (basic) continue;
    for (int i = 0; i <= m; ++i) tab.t[i][j] = Rational(0);
  }
  if (!tab.run()) {
    res.feasible = true;
    res.unbounded = true;
    return res;
  }
  res.feasible = true;
  res.objective = -tab.t[m][tab.n];
  res.y.assign(n, Rational(0));
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] < n) res.y[tab.basis[i]] = tab.t[i][tab.n];
  }
  return res;
}

bool positive_point_in_span(const QMat& basis, QVec* witness) {
  if (basis.empty()) return false;
  const int d = static_cast<int>(basis.size());
  const int p = static_cast<int>(basis[0].size());
  // Variables y = (cp_1..cp_d, cm_1..cm_d, t, slack_1..slack_p), all >= 0,
  // encoding x = B^T (cp - cm), x_i - t - slack_i = 0, sum_i x_i = 1; max t.
  const int nv = 2 * d + 1 + p;
  QMat a(p + 1, QVec(nv, Rational(0)));
  QVec b(p + 1, Rational(0));
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < d; ++j) {
      a[i][j] = basis[j][i];
      a[i][d + j] = -basis[j][i];
    }
    a[i][2 * d] = Rational(-1);
    a[i][2 * d + 1 + i] = Rational(-1);
  }
  for (int j = 0; j < d; ++j) {
    Rational colsum(0);
    for (int i = 0; i < p; ++i) colsum += basis[j][i];
    a[p][j] = colsum;
    a[p][d + j] = -colsum;
  }
  b[p] = Rational(1);
  QVec c(nv, Rational(0));
  c[2 * d] = Rational(1);
  LpResult lp = lp_max(c, a, b);
  if (!lp.feasible) return false;
  bool strict = lp.unbounded || lp.objective > Rational(0);
  if (strict && witness != nullptr && !lp.unbounded) {
    witness->assign(p, Rational(0));
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < d; ++j) (*witness)[i] += (lp.y[j] - lp.y[d + j]) * basis[j][i];
    }
  }
  return strict;
}

IMat IMat::identity(int dim) {
  IMat m(dim);
  for (int i = 0; i < dim; ++i) m.at(i, i) = 1;
  return m;
}

IMat operator*(const IMat& lhs, const IMat& rhs) {
  IMat out(lhs.n);
  for (int i = 0; i < lhs.n; ++i) {
    for (int k = 0; k < lhs.n; ++k) {
      std::int64_t v = lhs.at(i, k);
      if (v == 0) continue;
      for (int j = 0; j < lhs.n; ++j) {
        std::int64_t prod, acc;
        if (__builtin_mul_overflow(v, rhs.at(k, j), &prod) ||
            __builtin_add_overflow(out.at(i, j), prod, &acc)) {
          fail(Err::Overflow, "carrying matrix product");
        }
        out.at(i, j) = acc;
      }
    }
  }
  return out;
}

QVec IMat::apply(const QVec& v) const {
  QVec out(n, Rational(0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (at(i, j) != 0) out[i] += Rational(at(i, j)) * v[j];
    }
  }
  return out;
}

DVec IMat::apply(const DVec& v) const {
  DVec out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += static_cast<double>(at(i, j)) * v[j];
    out[i] = acc;
  }
  return out;
}

DVec IMat::apply_transpose(const DVec& v) const {
  DVec out(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += static_cast<double>(at(i, j)) * v[i];
    out[j] = acc;
  }
  return out;
}

QVec IMat::apply_transpose(const QVec& v) const {
  QVec out(n, Rational(0));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (at(i, j) != 0) out[j] += Rational(at(i, j)) * v[i];
    }
  }
  return out;
}

IMat IMat::transposed() const {
  IMat out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out.at(j, i) = at(i, j);
  }
  return out;
}

QMat IMat::to_rational() const {
  QMat out(n, QVec(n, Rational(0)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out[i][j] = Rational(at(i, j));
  }
  return out;
}

std::vector<double> IMat::to_double() const {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = static_cast<double>(a[i]);
  return out;
}

bool lu_solve(DMat a, DVec b, DVec* x) {
  const int n = a.rows;
  for (int c = 0; c < n; ++c) {
    int pivot = c;
    for (int i = c + 1; i < n; ++i) {
      if (std::fabs(a.at(i, c)) > std::fabs(a.at(pivot, c))) pivot = i;
    }
    if (std::fabs(a.at(pivot, c)) < 1e-300) return false;
    if (pivot != c) {
      for (int j = 0; j < n; ++j) std::swap(a.at(c, j), a.at(pivot, j));
      std::swap(b[c], b[pivot]);
    }
    for (int i = c + 1; i < n; ++i) {
      double f = a.at(i, c) / a.at(c, c);
      if (f == 0.0) continue;
      for (int j = c; j < n; ++j) a.at(i, j) -= f * a.at(c, j);
      b[i] -= f * b[c];
    }
  }
  x->assign(n, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double acc = b[i];
    for (int j = i + 1; j < n; ++j) acc -= a.at(i, j) * (*x)[j];
    (*x)[i] = acc / a.at(i, i);
  }
  return true;
}

double lu_det(DMat a) {
  const int n = a.rows;
  double d = 1.0;
  for (int c = 0; c < n; ++c) {
    int pivot = c;
    for (int i = c + 1; i < n; ++i) {
      if (std::fabs(a.at(i, c)) > std::fabs(a.at(pivot, c))) pivot = i;
    }
    if (std::fabs(a.at(pivot, c)) < 1e-300) return 0.0;
    if (pivot != c) {
      for (int j = 0; j < n; ++j) std::swap(a.at(c, j), a.at(pivot, j));
      d = -d;
    }
    d *= a.at(c, c);
    for (int i = c + 1; i < n; ++i) {
      double f = a.at(i, c) / a.at(c, c);
      if (f == 0.0) continue;
      for (int j = c; j < n; ++j) a.at(i, j) -= f * a.at(c, j);
    }
  }
  return d;
}

std::vector<DVec> orthonormal_rows(const std::vector<DVec>& m, double eps) {
  std::vector<DVec> out;
  for (DVec v : m) {
    for (const auto& u : out) {
      double proj = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) proj += u[i] * v[i];
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= proj * u[i];
    }
    double norm2 = 0.0;
    for (double e : v) norm2 += e * e;
    if (norm2 < eps * eps) continue;
    double inv = 1.0 / std::sqrt(norm2);
    for (double& e : v) e *= inv;
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace ttlab::lin
