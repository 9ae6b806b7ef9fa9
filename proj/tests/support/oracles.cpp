#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace ttlab::oracles {

std::vector<lin::QVec> extreme_rays_by_support(const lin::QMat& a, int cols) {
  std::vector<lin::QVec> out;
  const std::uint64_t limit = 1ULL << cols;
  for (std::uint64_t mask = 1; mask < limit; ++mask) {
    // Zero out coordinates outside the support and solve.
    lin::QMat sys = a;
    for (int i = 0; i < cols; ++i) {
      if (!(mask >> i & 1)) {
        lin::QVec row(cols, Rational(0));
        row[i] = Rational(1);
        sys.push_back(row);
      }
    }
    lin::QMat kernel = lin::kernel_basis(sys, cols);
    if (kernel.size() != 1) continue;
    const lin::QVec& g = kernel[0];
    int sign = 0;
    bool definite = true;
    std::uint64_t support = 0;
    for (int i = 0; i < cols; ++i) {
      int s = g[i].sign();
      if (s == 0) continue;
      support |= 1ULL << i;
      if (sign == 0) sign = s;
      if (s != sign) definite = false;
    }
    if (!definite || support != mask || sign == 0) continue;
    // Primitive integer representative, positively oriented.
    lin::QVec ray(cols);
    Rational::Int lcm = 1;
    auto gcd = [](Rational::Int x, Rational::Int y) {
      if (x < 0) x = -x;
      if (y < 0) y = -y;
      while (y != 0) {
        Rational::Int t = x % y;
        x = y;
        y = t;
      }
      return x;
    };
    for (int i = 0; i < cols; ++i) lcm = lcm / gcd(lcm, g[i].den()) * g[i].den();
    Rational::Int common = 0;
    std::vector<Rational::Int> ints(cols);
    for (int i = 0; i < cols; ++i) {
      ints[i] = g[i].num() * (lcm / g[i].den()) * sign;
      common = gcd(common, ints[i]);
    }
    if (common == 0) common = 1;
    for (int i = 0; i < cols; ++i) ray[i] = Rational::from_int128(ints[i] / common, 1);
    out.push_back(std::move(ray));
  }
  auto lex = [](const lin::QVec& x, const lin::QVec& y) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] != y[i]) return x[i] < y[i];
    }
    return false;
  };
  std::sort(out.begin(), out.end(), lex);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  const std::size_t n = x.size();
  if (n < 2) return f;
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

}  // namespace ttlab::oracles
