#include "ttlab/pf.hpp"

#include <cmath>

#include "ttlab/cone.hpp"
#include "ttlab/error.hpp"
#include "ttlab/kernels.hpp"
#include "ttlab/parallel.hpp"
#include "ttlab/rng.hpp"

namespace ttlab::pf {

namespace {

std::vector<lin::DVec> standard_rays(int n) {
  std::vector<lin::DVec> rays;
  for (int i = 0; i < n; ++i) {
    lin::DVec e(n, 0.0);
    e[i] = 1.0;
    rays.push_back(std::move(e));
  }
  return rays;
}

bool positive(const lin::DVec& v) {
  for (double e : v) {
    if (!(e > 0.0)) return false;
  }
  return true;
}

}  // namespace

bool is_primitive_on(const lin::IMat& b, const std::vector<lin::DVec>& rays) {
  const int n = b.n;
  const std::vector<lin::DVec>& cone_rays = rays;
  // Wielandt-style bound on the power needed for strict positivity.
  const int bound = (n - 1) * (n - 1) + 2;
  std::vector<lin::DVec> cur = cone_rays;
  std::vector<double> bd = b.to_double();
  lin::DVec tmp(n);
  for (int m = 1; m <= bound; ++m) {
    bool all_pos = true;
    for (auto& r : cur) {
      simd::matvec(bd.data(), n, n, r.data(), tmp.data());
      double total = simd::sum(tmp.data(), n);
      if (total <= 0.0) return false;
      simd::scale(1.0 / total, tmp.data(), n);  // keep magnitudes tame
      r = tmp;
      if (!positive(r)) all_pos = false;
    }
    if (all_pos) return true;
  }
  return false;
}

PFResult pf_eigen(const lin::IMat& b, const std::vector<lin::DVec>& rays, double tol,
                  int max_iter) {
  const int n = b.n;
  std::vector<lin::DVec> cone = rays.empty() ? standard_rays(n) : rays;
  if (!is_primitive_on(b, cone)) {
    fail(Err::NotPrimitive, "matrix is not primitive on the given cone");
  }
  std::vector<double> bd = b.to_double();
  std::vector<double> bt = b.transposed().to_double();

  auto iterate = [&](const std::vector<double>& mat, lin::DVec v, double* lambda, int* iters) {
    lin::DVec next(n);
    double lam = 1.0;
    int it = 0;
    for (; it < max_iter; ++it) {
      simd::matvec(mat.data(), n, n, v.data(), next.data());
      double total = simd::sum(next.data(), n);
      lam = total / simd::sum(v.data(), n);
      simd::scale(1.0 / total, next.data(), n);
      // Convergence in the sup norm of the normalized iterates.
      double diff = 0.0;
      lin::DVec prev_norm = cone::normalize_mass(v);
      for (int i = 0; i < n; ++i) diff = std::max(diff, std::fabs(next[i] - prev_norm[i]));
      v = next;
      if (diff <= tol) break;
    }
    *lambda = lam;
    *iters = it;
    return v;
  };

  // Interior starting vector: mean of the cone rays.
  lin::DVec start(n, 0.0);
  for (const auto& r : cone) simd::axpy(1.0 / cone.size(), r.data(), start.data(), n);
  start = cone::normalize_mass(start);

  PFResult res;
  int it_r = 0, it_l = 0;
  double lam_r = 0.0, lam_l = 0.0;
  res.right = iterate(bd, start, &lam_r, &it_r);
  // The transpose acts on the dual side; the positive orthant is the safe
  // starting cone there.
  lin::DVec dual_start(n, 1.0 / n);
  res.left = iterate(bt, dual_start, &lam_l, &it_l);
  res.lambda1 = lam_r;
  res.iterations = std::max(it_r, it_l);

  // Residual-based second-eigenvalue estimate: one more iteration pair.
  lin::DVec v1(n), v2(n);
  simd::matvec(bd.data(), n, n, res.right.data(), v1.data());
  double l1 = simd::sum(v1.data(), n);
  simd::scale(1.0 / l1, v1.data(), n);
  simd::matvec(bd.data(), n, n, v1.data(), v2.data());
  double l2 = simd::sum(v2.data(), n);
  simd::scale(1.0 / l2, v2.data(), n);
  double d1 = 0.0, d2 = 0.0;
  for (int i = 0; i < n; ++i) {
    d1 = std::max(d1, std::fabs(v1[i] - res.right[i]));
    d2 = std::max(d2, std::fabs(v2[i] - v1[i]));
  }
  double ratio = d1 > 1e-300 ? std::min(1.0, d2 / d1) : 0.0;
  res.gap = res.lambda1 * (1.0 - ratio);

  // Scale the left vector so the duality pairing is one.
  double pairing = simd::dot(res.left.data(), res.right.data(), n);
  if (pairing > 0.0) simd::scale(1.0 / pairing, res.left.data(), n);
  return res;
}

LetterSpectra letter_spectra(const sym::AAlphabet& a) {
  LetterSpectra out;
  auto rays_q = cone::vertex_cycles(a.tau);
  std::vector<lin::DVec> rays;
  for (const auto& r : rays_q) rays.push_back(lin::to_double(r.values));
  out.log_lambda1.resize(a.letters.size());
  out.eigen.resize(a.letters.size());
  parallel_for(a.letters.size(), [&](std::size_t i) {
    PFResult r = pf_eigen(a.letters[i].b_matrix, rays);
    out.log_lambda1[i] = std::log(r.lambda1);
    out.eigen[i] = std::move(r);
  });
  return out;
}

BandReport eigen_band(const sym::AAlphabet& a, const LetterSpectra& spectra, int samples,
                      std::uint64_t seed) {
  BandReport rep;
  // Sample points of the base manifold C: the carried images of the vertex
  // cycles under the marked loop span its extreme points.
  auto rays_q = cone::vertex_cycles(a.tau);
  std::vector<lin::DVec> rays;
  for (const auto& r : rays_q) rays.push_back(lin::to_double(a.base_matrix.apply(r.values)));
  const int p = static_cast<int>(a.tau.branches.size());

  std::vector<double> lengths(a.letters.size());
  rep.per_letter_band.resize(a.letters.size());
  // Per-letter generators keep the sampling deterministic under threading.
  parallel_for(a.letters.size(), [&](std::size_t li) {
    const auto& letter = a.letters[li];
    Rng rng(seed + 0x9e3779b97f4a7c15ULL * (li + 1));
    std::vector<double> bd = letter.b_matrix.to_double();
    double lam = std::exp(spectra.log_lambda1[li]);
    double band = 1.0;  // the eigenvector itself sits at ratio one
    lin::DVec zeta(p), img(p);
    for (int s = 0; s < samples; ++s) {
      std::fill(zeta.begin(), zeta.end(), 0.0);
      for (const auto& r : rays) simd::axpy(rng.exponential(), r.data(), zeta.data(), p);
      double mass = simd::sum(zeta.data(), p);
      simd::matvec(bd.data(), p, p, zeta.data(), img.data());
      double ratio = simd::sum(img.data(), p) / mass / lam;  // e^omega / lambda1
      band = std::max(band, std::max(ratio, 1.0 / ratio));
    }
    rep.per_letter_band[li] = band;
    lengths[li] = static_cast<double>(letter.steps_to_return);
  });
  for (double b : rep.per_letter_band) rep.chi_hat = std::max(rep.chi_hat, b);

  // Trend of log band against word length.
  const std::size_t m = lengths.size();
  double sx = 0, sy = 0;
  std::vector<double> ly(m);
  for (std::size_t i = 0; i < m; ++i) {
    ly[i] = std::log(rep.per_letter_band[i]);
    sx += lengths[i];
    sy += ly[i];
  }
  double mx = sx / m, my = sy / m, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (lengths[i] - mx) * (lengths[i] - mx);
    sxy += (lengths[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx > 0) {
    rep.trend_slope = sxy / sxx;
    rep.trend_r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  }
  return rep;
}

}  // namespace ttlab::pf
