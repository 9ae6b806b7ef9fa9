#pragma once

#include <vector>

#include "ttlab/linalg.hpp"

namespace ttlab::oracles {

// Independent extreme-ray enumeration for {x >= 0, a x = 0}: for every
// support pattern, an extreme ray exists exactly when the system restricted
// to that support has a one-dimensional kernel whose generator is sign
// definite with full support. Exponential in the dimension; the check for
// the double description output on small tracks.
std::vector<lin::QVec> extreme_rays_by_support(const lin::QMat& a, int cols);

// Spectral radius by Hessenberg reduction and shifted QR iteration; the
// dense-solver check for the cone-based power iteration.
double spectral_radius_dense(const std::vector<double>& matrix, int n);

// Least-squares line fit y ~ a + b x; returns (slope, intercept, r2).
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ttlab::oracles
