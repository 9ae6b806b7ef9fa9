#include <cmath>
#include <cstdlib>
#include <vector>

#include "support/oracles.hpp"

namespace ttlab::oracles {

namespace {

// Reduce to upper Hessenberg form by stabilized elementary transformations.
void hessenberg(std::vector<double>& a, int n) {
  auto at = [&](int r, int c) -> double& { return a[static_cast<std::size_t>(r) * n + c]; };
  for (int m = 1; m < n - 1; ++m) {
    double x = 0.0;
    int i = m;
    for (int j = m; j < n; ++j) {
      if (std::fabs(at(j, m - 1)) > std::fabs(x)) {
        x = at(j, m - 1);
        i = j;
      }
    }
    if (i != m) {
      for (int j = m - 1; j < n; ++j) std::swap(at(i, j), at(m, j));
      for (int j = 0; j < n; ++j) std::swap(at(j, i), at(j, m));
    }
    if (x != 0.0) {
      for (int k = m + 1; k < n; ++k) {
        double y = at(k, m - 1);
        if (y == 0.0) continue;
        y /= x;
        at(k, m - 1) = y;
        for (int j = m; j < n; ++j) at(k, j) -= y * at(m, j);
        for (int j = 0; j < n; ++j) at(j, m) += y * at(j, k);
      }
    }
  }
  // Zero the junk below the subdiagonal.
  auto att = [&](int r, int c) -> double& { return a[static_cast<std::size_t>(r) * n + c]; };
  for (int r = 2; r < n; ++r) {
    for (int c = 0; c < r - 1; ++c) att(r, c) = 0.0;
  }
}

// Francis double-shift QR on a Hessenberg matrix; eigenvalues out as
// (real, imag) pairs.
std::vector<std::pair<double, double>> hqr(std::vector<double>& a, int n) {
  auto at = [&](int r, int c) -> double& { return a[static_cast<std::size_t>(r) * n + c]; };
  std::vector<std::pair<double, double>> eig;
  double anorm = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::fabs(at(i, j));
  }
  int nn = n - 1;
  double t = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l;
    do {
      for (l = nn; l >= 1; --l) {
        double s = std::fabs(at(l - 1, l - 1)) + std::fabs(at(l, l));
        if (s == 0.0) s = anorm;
        if (std::fabs(at(l, l - 1)) + s == s) {
          at(l, l - 1) = 0.0;
          break;
        }
      }
      double x = at(nn, nn);
      if (l == nn) {
        eig.push_back({x + t, 0.0});
        --nn;
      } else {
        double y = at(nn - 1, nn - 1);
        double w = at(nn, nn - 1) * at(nn - 1, nn);
        if (l == nn - 1) {
          double p = 0.5 * (y - x);
          double q = p * p + w;
          double z = std::sqrt(std::fabs(q));
          x += t;
          if (q >= 0.0) {
            z = p + (p >= 0.0 ? std::fabs(z) : -std::fabs(z));
            eig.push_back({x + z, 0.0});
            eig.push_back({z != 0.0 ? x - w / z : x + z, 0.0});
          } else {
            eig.push_back({x + p, z});
            eig.push_back({x + p, -z});
          }
          nn -= 2;
        } else {
          if (its == 60) {
            // No convergence; report what is on the diagonal.
            eig.push_back({x + t, 0.0});
            --nn;
            its = 0;
            continue;
          }
          double p = 0, q = 0, z = 0, r = 0, s = 0;
          if (its == 10 || its == 20) {
            t += x;
            for (int i = 0; i <= nn; ++i) at(i, i) -= x;
            s = std::fabs(at(nn, nn - 1)) + std::fabs(at(nn - 1, nn - 2));
            x = y = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m;
          for (m = nn - 2; m >= l; --m) {
            z = at(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - w) / at(m + 1, m) + at(m, m + 1);
            q = at(m + 1, m + 1) - z - r - s;
            r = at(m + 2, m + 1);
            s = std::fabs(p) + std::fabs(q) + std::fabs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            double u = std::fabs(at(m, m - 1)) * (std::fabs(q) + std::fabs(r));
            double v = std::fabs(p) *
                       (std::fabs(at(m - 1, m - 1)) + std::fabs(z) + std::fabs(at(m + 1, m + 1)));
            if (u + v == v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            at(i, i - 2) = 0.0;
            if (i != m + 2) at(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = at(k, k - 1);
              q = at(k + 1, k - 1);
              r = k != nn - 1 ? at(k + 2, k - 1) : 0.0;
              x = std::fabs(p) + std::fabs(q) + std::fabs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            s = std::sqrt(p * p + q * q + r * r);
            if (p < 0.0) s = -s;
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) at(k, k - 1) = -at(k, k - 1);
            } else {
              at(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            double yy = q / s;
            z = r / s;
            q = q / p;
            r = r / p;
            for (int j = k; j <= nn; ++j) {
              p = at(k, j) + q * at(k + 1, j);
              if (k != nn - 1) {
                p += r * at(k + 2, j);
                at(k + 2, j) -= p * z;
              }
              at(k + 1, j) -= p * yy;
              at(k, j) -= p * x;
            }
            int mmin = nn < k + 3 ? nn : k + 3;
            for (int i = l; i <= mmin; ++i) {
              p = x * at(i, k) + yy * at(i, k + 1);
              if (k != nn - 1) {
                p += z * at(i, k + 2);
                at(i, k + 2) -= p * r;
              }
              at(i, k + 1) -= p * q;
              at(i, k) -= p;
            }
          }
        }
      }
    } while (nn >= 0 && l < nn);
  }
  return eig;
}

}  // namespace

double spectral_radius_dense(const std::vector<double>& matrix, int n) {
  if (n == 0) return 0.0;
  if (n == 1) return std::fabs(matrix[0]);
  std::vector<double> a = matrix;
  hessenberg(a, n);
  auto eig = hqr(a, n);
  double best = 0.0;
  for (const auto& [re, im] : eig) best = std::max(best, std::hypot(re, im));
  return best;
}

}  // namespace ttlab::oracles
