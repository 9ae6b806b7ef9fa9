#include "ttlab/pressure.hpp"

#include <algorithm>
#include <cmath>

#include "ttlab/error.hpp"

namespace ttlab::pressure {

PressureEstimate gurevich_pressure(const ShiftModel& model, double s, int anchor, int n_max) {
  const int n = model.size();
  if (anchor < 0 || anchor >= n) fail(Err::AnchorMissing, "anchor letter not in the alphabet");
  PressureEstimate est;
  est.s = s;
  est.n_max = n_max;

  // Row vector over letters; log-scaled to dodge overflow. r starts as the
  // anchored weight, then r <- r M with M_{xy} = [x->y allowed] e^{-s w(y)}.
  std::vector<double> weight(n);
  for (int i = 0; i < n; ++i) weight[i] = std::exp(-s * model.omega[i]);
  std::vector<double> r(n, 0.0), next(n);
  r[anchor] = weight[anchor];
  double log_scale = 0.0;

  for (int len = 1; len <= n_max; ++len) {
    // Close the word: only letters allowed to step back to the anchor count.
    double zn = 0.0;
    for (int y = 0; y < n; ++y) {
      if (model.transition(y, anchor)) zn += r[y];
    }
    if (zn <= 0.0) {
      est.log_zn.push_back(-1e300);
    } else {
      est.log_zn.push_back(std::log(zn) + log_scale);
    }
    if (len == n_max) break;
    std::fill(next.begin(), next.end(), 0.0);
    for (int x = 0; x < n; ++x) {
      if (r[x] == 0.0) continue;
      for (int y = 0; y < n; ++y) {
        if (model.transition(x, y)) next[y] += r[x] * weight[y];
      }
    }
    double peak = 0.0;
    for (double e : next) peak = std::max(peak, e);
    if (peak <= 0.0) fail(Err::NoConvergence, "partition sums vanished");
    for (auto& e : next) e /= peak;
    log_scale += std::log(peak);
    r = next;
  }

  // Successive differences converge geometrically to the pressure; Aitken
  // accelerates the final estimate.
  std::vector<double> d;
  for (std::size_t i = 1; i < est.log_zn.size(); ++i) {
    d.push_back(est.log_zn[i] - est.log_zn[i - 1]);
  }
  if (d.empty()) {
    est.p_hat = est.log_zn.empty() ? 0.0 : est.log_zn[0];
    est.band = 1.0;
    return est;
  }
  double p = d.back();
  double band = d.size() >= 2 ? std::fabs(d[d.size() - 1] - d[d.size() - 2]) : 1.0;
  if (d.size() >= 3) {
    double x0 = d[d.size() - 3], x1 = d[d.size() - 2], x2 = d[d.size() - 1];
    double denom = x2 - 2 * x1 + x0;
    if (std::fabs(denom) > 1e-14 * (std::fabs(x2) + 1.0)) {
      double accel = x2 - (x2 - x1) * (x2 - x1) / denom;
      band = std::max(std::fabs(accel - x2), 1e-16);
      p = accel;
    } else {
      band = std::fabs(x2 - x1);
    }
  }
  est.p_hat = p;
  est.band = band;
  return est;
}

TailReport tail_exponent(const ShiftModel& model, double threshold, int caps, double tol) {
  TailReport rep;
  rep.threshold = threshold;
  for (int i = 0; i < model.size(); ++i) {
    if (model.omega[i] > threshold) rep.restricted.push_back(i);
  }
  if (rep.restricted.empty()) fail(Err::EmptyRestriction, "no letter above the threshold");
  if (rep.restricted.size() < 2) {
    fail(Err::NoSignChange, "restricted pressure of a single letter never crosses zero");
  }

  ShiftModel restricted;
  for (int i : rep.restricted) restricted.omega.push_back(model.omega[i]);
  if (!model.allowed.empty()) {
    const int m = static_cast<int>(rep.restricted.size());
    restricted.allowed.assign(m, std::vector<bool>(m, false));
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        restricted.allowed[a][b] = model.allowed[rep.restricted[a]][rep.restricted[b]];
      }
    }
  }

  const int n_max = 14;
  auto pressure_at = [&](double s) {
    return gurevich_pressure(restricted, s, 0, n_max).p_hat;
  };
  double p0 = pressure_at(0.0);
  if (!(p0 > 0.0)) fail(Err::NoSignChange, "restricted pressure nonpositive at s = 0");
  // Bracket by doubling, then bisect.
  double lo = 0.0, hi = 1.0;
  while (pressure_at(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) fail(Err::NoSignChange, "restricted pressure never crosses zero");
  }
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (pressure_at(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  rep.delta_hat = 0.5 * (lo + hi);

  // Nested caps: letters sorted by omega, windows of growing size; the tail
  // increments of sum e^{-delta omega} should decay.
  std::vector<double> omegas;
  for (int i : rep.restricted) omegas.push_back(model.omega[i]);
  std::sort(omegas.begin(), omegas.end());
  const std::size_t m = omegas.size();
  double acc = 0.0;
  std::size_t cut = 0;
  for (int c = 1; c <= caps; ++c) {
    std::size_t next_cut = m * c / caps;
    double inc = 0.0;
    for (; cut < next_cut; ++cut) inc += std::exp(-rep.delta_hat * omegas[cut]);
    acc += inc;
    rep.partial_sums.push_back(acc);
    rep.cap_increments.push_back(inc);
  }
  rep.increments_decreasing = true;
  for (std::size_t i = 1; i < rep.cap_increments.size(); ++i) {
    if (rep.cap_increments[i] > rep.cap_increments[i - 1]) rep.increments_decreasing = false;
  }
  return rep;
}

}  // namespace ttlab::pressure
