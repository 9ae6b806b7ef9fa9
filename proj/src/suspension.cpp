#include "ttlab/suspension.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ttlab/cone.hpp"
#include "ttlab/error.hpp"
#include "ttlab/kernels.hpp"
#include "ttlab/rng.hpp"

namespace ttlab::mix {

namespace {

constexpr double kDtFloor = 1e-6;

void align_roofs(SuspensionFlow* flow) {
  if (flow->dt < kDtFloor) fail(Err::GridTooFine, "dt below the resolution floor");
  flow->r1 = 1e300;
  for (auto& r : flow->roof) {
    int slots = static_cast<int>(std::lround(r / flow->dt));
    if (slots < 2) {
      fail(Err::GridTooFine, "a roof column has fewer than two slots; enlarge dt or the roof");
    }
    r = slots * flow->dt;
    flow->r1 = std::min(flow->r1, r);
  }
  double mass = 0.0;
  for (double m : flow->base_mass) mass += m;
  for (auto& m : flow->base_mass) m /= mass;
  flow->total_measure = 0.0;
  for (int x = 0; x < flow->columns(); ++x) {
    flow->total_measure += flow->base_mass[x] * flow->roof[x];
  }
}

}  // namespace

SuspensionFlow make_flow(const sym::AAlphabet& a, const pf::LetterSpectra& spectra,
                         const cells::Slice& slice, const cells::Mesh& mesh,
                         const cells::AcipResult& density, double dt, int volume_samples,
                         std::uint64_t seed) {
  SuspensionFlow flow;
  flow.dt = dt;
  auto vol_c = cells::slice_volume(slice, std::max(20000, volume_samples * 10), seed);
  const int p = static_cast<int>(slice.center.size());
  for (std::size_t li = 0; li < a.letters.size(); ++li) {
    const auto& letter = a.letters[li];
    flow.roof.push_back(spectra.log_lambda1[li]);
    // Cylinder mass: density at the cell's central point times cell volume.
    auto vol = cells::cell_volume(slice, letter.b_matrix, vol_c.value, volume_samples,
                                  seed + 7919 * li);
    std::vector<double> bd = letter.b_matrix.to_double();
    lin::DVec img(p);
    simd::matvec(bd.data(), p, p, slice.center.data(), img.data());
    lin::DVec cell_center = cone::normalize_mass(img);
    double dens = mesh.interpolate(density.density, slice.project(cell_center));
    if (dens <= 0.0) dens = density.min_density;
    flow.base_mass.push_back(std::max(1e-300, dens * vol.value));
  }
  align_roofs(&flow);
  return flow;
}

SuspensionFlow make_constant_flow(int letters, double roof_value, double dt) {
  SuspensionFlow flow;
  flow.dt = dt;
  flow.roof.assign(letters, roof_value);
  flow.base_mass.assign(letters, 1.0 / letters);
  align_roofs(&flow);
  return flow;
}

double observable_value(const SuspensionFlow& flow, const Observable& f, int letter, double u) {
  if (std::find(f.letters.begin(), f.letters.end(), letter) == f.letters.end()) return 0.0;
  if (f.bump_width <= 0.0) return 1.0;
  double z = (u - f.bump_center) / f.bump_width;
  if (z <= -1.0 || z >= 1.0 || u >= flow.roof[letter]) return 0.0;
  double c = std::cos(1.5707963267948966 * z);
  return c * c;
}

double flow_integral(const SuspensionFlow& flow, const Observable& f) {
  double acc = 0.0;
  for (int x = 0; x < flow.columns(); ++x) {
    int n = flow.slots(x);
    for (int j = 0; j < n; ++j) {
      acc += flow.base_mass[x] * observable_value(flow, f, x, (j + 0.5) * flow.dt) * flow.dt;
    }
  }
  return acc / flow.total_measure;
}

namespace {

// Tower state: one mass per (column, slot). Advancing by dt moves every slot
// up; roof overflow redistributes to the column bottoms with the stationary
// Bernoulli weights.
struct Tower {
  const SuspensionFlow& flow;
  std::vector<std::vector<double>> mass;

  explicit Tower(const SuspensionFlow& f) : flow(f) {
    for (int x = 0; x < f.columns(); ++x) {
      mass.push_back(std::vector<double>(f.slots(x), 0.0));
    }
  }

  void step() {
    double overflow = 0.0;
    for (int x = 0; x < flow.columns(); ++x) {
      overflow += mass[x].back();
      for (int j = static_cast<int>(mass[x].size()) - 1; j > 0; --j) {
        mass[x][j] = mass[x][j - 1];
      }
      mass[x][0] = 0.0;
    }
    for (int x = 0; x < flow.columns(); ++x) {
      mass[x][0] = overflow * flow.base_mass[x];
    }
  }

  double pair_with(const SuspensionFlow& f, const Observable& g, double g_mean) const {
    double acc = 0.0;
    for (int x = 0; x < f.columns(); ++x) {
      for (std::size_t j = 0; j < mass[x].size(); ++j) {
        double gv = observable_value(f, g, x, (j + 0.5) * f.dt) - g_mean;
        acc += mass[x][j] * gv;
      }
    }
    return acc;
  }
};

}  // namespace

CorrelationSeries correlation(const SuspensionFlow& flow, const Observable& f,
                              const Observable& g, double t_max) {
  if (flow.dt < kDtFloor) fail(Err::GridTooFine, "dt below the resolution floor");
  double f_mean = f.mean_zero ? flow_integral(flow, f) : 0.0;
  double g_mean = g.mean_zero ? flow_integral(flow, g) : 0.0;
  if (f.mean_zero) {
    // Centering must actually produce a zero-mean signal on the grid.
    double resid = flow_integral(flow, f) - f_mean;
    if (std::fabs(resid) > 1e-9) fail(Err::NotMeanZero, "observable failed to center");
  }

  Tower tower(flow);
  for (int x = 0; x < flow.columns(); ++x) {
    for (std::size_t j = 0; j < tower.mass[x].size(); ++j) {
      double fv = observable_value(flow, f, x, (j + 0.5) * flow.dt) - f_mean;
      tower.mass[x][j] = flow.base_mass[x] * fv * flow.dt / flow.total_measure;
    }
  }

  CorrelationSeries series;
  const int steps = static_cast<int>(t_max / flow.dt);
  for (int s = 0; s <= steps; ++s) {
    series.t.push_back(s * flow.dt);
    series.value.push_back(tower.pair_with(flow, g, g_mean));
    tower.step();
  }
  return series;
}

double invariance_defect(const SuspensionFlow& flow, const Observable& g, double t_max) {
  // Evolve the invariant measure itself and pair with g.
  Tower tower(flow);
  for (int x = 0; x < flow.columns(); ++x) {
    for (std::size_t j = 0; j < tower.mass[x].size(); ++j) {
      tower.mass[x][j] = flow.base_mass[x] * flow.dt / flow.total_measure;
    }
  }
  double expected = tower.pair_with(flow, g, 0.0);
  double defect = 0.0;
  const int steps = static_cast<int>(t_max / flow.dt);
  for (int s = 0; s < steps; ++s) {
    tower.step();
    defect = std::max(defect, std::fabs(tower.pair_with(flow, g, 0.0) - expected));
  }
  return defect;
}

DecayFit decay_rate_fit(const CorrelationSeries& series) {
  if (series.value.size() < 20) fail(Err::NonPositiveSeries, "series too short for a fit");
  // Local maxima of |C|.
  std::vector<double> xs, ys;
  for (std::size_t i = 1; i + 1 < series.value.size(); ++i) {
    double v = std::fabs(series.value[i]);
    if (v > std::fabs(series.value[i - 1]) && v >= std::fabs(series.value[i + 1]) && v > 0.0) {
      xs.push_back(series.t[i]);
      ys.push_back(std::log(v));
    }
  }
  if (xs.size() < 3) {
    // Monotone decay without oscillation: fit the positive values directly.
    xs.clear();
    ys.clear();
    for (std::size_t i = 0; i < series.value.size(); ++i) {
      double v = std::fabs(series.value[i]);
      if (v > 0.0) {
        xs.push_back(series.t[i]);
        ys.push_back(std::log(v));
      }
    }
  }
  if (xs.size() < 3) fail(Err::NonPositiveSeries, "no positive envelope to fit");
  const std::size_t n = xs.size();
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  double mx = sx / n, my = sy / n, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  DecayFit fit;
  fit.peaks = static_cast<int>(n);
  if (sxx > 0) {
    fit.rate = -sxy / sxx;
    fit.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  }
  return fit;
}

RoofReport good_roof_check(const sym::AAlphabet& a, const pf::LetterSpectra& spectra,
                           const cells::Slice& slice, int samples, double r2_cap) {
  RoofReport rep;
  rep.r1 = 1e300;
  for (double w : spectra.log_lambda1) rep.r1 = std::min(rep.r1, w);
  rep.bounded_below = rep.r1 > 0.0;

  // (2): sampled Lipschitz constant of omega o H_x^{-1}(z) = log mass(B z) - log mass(z).
  const int p = static_cast<int>(slice.center.size());
  cells::HitAndRun sampler(slice, 24029);
  Rng rng(61007);
  rep.r2 = 0.0;
  for (std::size_t li = 0; li < a.letters.size(); ++li) {
    std::vector<double> bd = a.letters[li].b_matrix.to_double();
    lin::DVec img(p), imgv(p);
    int per = std::max(4, samples / std::max(1, static_cast<int>(a.letters.size())));
    for (int s = 0; s < per; ++s) {
      lin::DVec zeta = sampler.next();
      lin::DVec v(p, 0.0);
      for (std::size_t j = 0; j < slice.frame.size(); ++j) {
        double w = (rng.uniform() - 0.5);
        simd::axpy(w, slice.frame[j].data(), v.data(), p);
      }
      double vn = cone::finsler_norm(v, zeta);
      if (vn <= 0.0) continue;
      simd::matvec(bd.data(), p, p, zeta.data(), img.data());
      simd::matvec(bd.data(), p, p, v.data(), imgv.data());
      double deriv = std::fabs(simd::sum(imgv.data(), p) / simd::sum(img.data(), p) -
                               simd::sum(v.data(), p) / simd::sum(zeta.data(), p)) /
                     vn;
      rep.r2 = std::max(rep.r2, deriv);
    }
  }
  rep.lipschitz_ok = rep.r2 < r2_cap;

  // (3a): distinct eigendirections across letters.
  for (std::size_t i = 0; i < spectra.eigen.size(); ++i) {
    for (std::size_t j = i + 1; j < spectra.eigen.size(); ++j) {
      double gap = 0.0;
      for (int b = 0; b < p; ++b) {
        gap = std::max(gap, std::fabs(spectra.eigen[i].right[b] - spectra.eigen[j].right[b]));
      }
      rep.max_eigendirection_gap = std::max(rep.max_eigendirection_gap, gap);
    }
  }
  rep.eigendirections_distinct = rep.max_eigendirection_gap > 1e-8;

  // (3b): periodic Birkhoff sums of a locally constant candidate would be
  // additive over concatenations; measure the defect.
  auto rays_q = cone::vertex_cycles(a.tau);
  std::vector<lin::DVec> rays;
  for (const auto& r : rays_q) rays.push_back(lin::to_double(r.values));
  const std::size_t pairs = std::min<std::size_t>(a.letters.size(), 8);
  for (std::size_t i = 0; i < pairs; ++i) {
    for (std::size_t j = 0; j < pairs; ++j) {
      if (i == j) continue;
      auto prod = pf::pf_eigen(a.letters[i].b_matrix * a.letters[j].b_matrix, rays);
      double defect = std::fabs(std::log(prod.lambda1) - spectra.log_lambda1[i] -
                                spectra.log_lambda1[j]);
      rep.max_additivity_defect = std::max(rep.max_additivity_defect, defect);
    }
  }
  rep.periodic_sums_nonadditive = rep.max_additivity_defect > 1e-8;
  rep.not_cohomologous = rep.eigendirections_distinct || rep.periodic_sums_nonadditive;
  return rep;
}

SkewReport skew_contract_check(const sym::AAlphabet& a, int samples, std::uint64_t seed) {
  SkewReport rep;
  rep.kappa = 1e300;
  const int p = static_cast<int>(a.tau.branches.size());
  Rng rng(seed);
  std::vector<std::vector<double>> transposed;
  for (const auto& letter : a.letters) {
    transposed.push_back(letter.b_matrix.transposed().to_double());
  }
  lin::DVec img1(p), img2(p);
  for (int s = 0; s < samples; ++s) {
    // Positive tangential pair, unit mass.
    lin::DVec n1(p), n2(p);
    for (int i = 0; i < p; ++i) {
      n1[i] = rng.exponential();
      n2[i] = rng.exponential();
    }
    n1 = cone::normalize_mass(n1);
    n2 = cone::normalize_mass(n2);
    lin::DVec diff(p);
    for (int i = 0; i < p; ++i) diff[i] = n1[i] - n2[i];
    double before = cone::finsler_norm(diff, n1);
    if (before <= 1e-12) continue;
    const auto& bt = transposed[rng.below(transposed.size())];
    simd::matvec(bt.data(), p, p, n1.data(), img1.data());
    simd::matvec(bt.data(), p, p, n2.data(), img2.data());
    lin::DVec m1 = cone::normalize_mass(img1);
    lin::DVec m2 = cone::normalize_mass(img2);
    for (int i = 0; i < p; ++i) diff[i] = m1[i] - m2[i];
    double after = cone::finsler_norm(diff, m1);
    if (after <= 0.0) continue;
    rep.kappa = std::min(rep.kappa, before / after);
    rep.worst_pair_distance = std::max(rep.worst_pair_distance, after);
    ++rep.samples;
  }
  return rep;
}

std::string correlation_csv(const CorrelationSeries& series) {
  std::ostringstream out;
  out << "t,C\n";
  out.precision(17);
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    out << series.t[i] << "," << series.value[i] << "\n";
  }
  return out.str();
}

std::string correlation_svg(const CorrelationSeries& series, int width, int height) {
  double tmax = series.t.empty() ? 1.0 : series.t.back();
  double vmax = 1e-300;
  for (double v : series.value) vmax = std::max(vmax, std::fabs(v));
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"0\" y1=\"" << height / 2 << "\" x2=\"" << width << "\" y2=\"" << height / 2
      << "\" stroke=\"#999\"/>\n<polyline fill=\"none\" stroke=\"#1f77b4\" points=\"";
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    double x = series.t[i] / tmax * width;
    double y = height / 2 - series.value[i] / vmax * (height / 2 - 8);
    out << x << "," << y << " ";
  }
  out << "\"/>\n</svg>\n";
  return out.str();
}

}  // namespace ttlab::mix
