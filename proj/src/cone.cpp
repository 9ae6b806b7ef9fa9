#include "ttlab/cone.hpp"

#include <algorithm>
#include <numeric>

#include "json.hpp"
#include "ttlab/error.hpp"
#include "ttlab/kernels.hpp"

namespace ttlab::cone {

namespace {

// Scale a rational vector to the primitive integer representative. Scaling
// is by a positive factor unless allow_flip is set (rays of a cone are only
// invariant under positive scaling).
lin::QVec primitive(const lin::QVec& v, bool allow_flip = false) {
  using Int = Rational::Int;
  auto gcd128 = [](Int a, Int b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      Int t = a % b;
      a = b;
      b = t;
    }
    return a;
  };
  Int lcm_den = 1;
  for (const auto& e : v) {
    Int d = e.den();
    lcm_den = lcm_den / gcd128(lcm_den, d) * d;
  }
  std::vector<Int> ints(v.size());
  Int gcd_all = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    ints[i] = v[i].num() * (lcm_den / v[i].den());
    gcd_all = gcd128(gcd_all, ints[i]);
  }
  if (gcd_all == 0) gcd_all = 1;
  int lead = 1;
  if (allow_flip) {
    for (const auto& e : ints) {
      if (e != 0) {
        lead = e > 0 ? 1 : -1;
        break;
      }
    }
  }
  lin::QVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = Rational::from_int128(ints[i] / gcd_all * lead, 1);
  }
  return out;
}

bool lex_less(const lin::QVec& a, const lin::QVec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

}  // namespace

std::vector<lin::QVec> extreme_rays(const lin::QMat& a, int cols) {
  lin::QMat kernel = lin::kernel_basis(a, cols);
  const int d = static_cast<int>(kernel.size());
  if (d == 0) return {};

  // Inequalities in kernel coordinates: row i demands x_i = sum_j K[j][i] c_j >= 0.
  lin::QMat m(cols, lin::QVec(d, Rational(0)));
  for (int i = 0; i < cols; ++i) {
    for (int j = 0; j < d; ++j) m[i][j] = kernel[j][i];
  }

  // Seed with d independent inequality rows; their inverse columns span the
  // initial simplicial cone.
  std::vector<int> seed;
  lin::QMat picked;
  for (int i = 0; i < cols && static_cast<int>(seed.size()) < d; ++i) {
    picked.push_back(m[i]);
    if (lin::rank(picked) == static_cast<int>(seed.size()) + 1) {
      seed.push_back(i);
    } else {
      picked.pop_back();
    }
  }
  if (static_cast<int>(seed.size()) < d) return {};  // cone not pointed; not expected here

  lin::QMat seed_m(d, lin::QVec(d));
  for (int r = 0; r < d; ++r) seed_m[r] = m[seed[r]];
  lin::QMat inv;
  if (!lin::invert(seed_m, &inv)) return {};
  std::vector<lin::QVec> rays;
  for (int j = 0; j < d; ++j) {
    lin::QVec r(d);
    for (int i = 0; i < d; ++i) r[i] = inv[i][j];
    rays.push_back(primitive(r));
  }

  std::vector<int> processed = seed;
  auto value = [&](const lin::QVec& row, const lin::QVec& ray) {
    Rational acc(0);
    for (int j = 0; j < d; ++j) acc += row[j] * ray[j];
    return acc;
  };
  auto active_set = [&](const lin::QVec& ray) {
    std::vector<int> act;
    for (int idx : processed) {
      if (value(m[idx], ray).is_zero()) act.push_back(idx);
    }
    return act;
  };

  for (int i = 0; i < cols; ++i) {
    if (std::find(processed.begin(), processed.end(), i) != processed.end()) continue;
    std::vector<Rational> vals(rays.size());
    bool any_neg = false;
    for (std::size_t r = 0; r < rays.size(); ++r) {
      vals[r] = value(m[i], rays[r]);
      if (vals[r] < Rational(0)) any_neg = true;
    }
    if (!any_neg) {
      processed.push_back(i);
      continue;
    }
    std::vector<lin::QVec> next;
    for (std::size_t r = 0; r < rays.size(); ++r) {
      if (vals[r] >= Rational(0)) next.push_back(rays[r]);
    }
    // Combine adjacent positive/negative pairs on the new hyperplane.
    for (std::size_t rp = 0; rp < rays.size(); ++rp) {
      if (!(vals[rp] > Rational(0))) continue;
      for (std::size_t rn = 0; rn < rays.size(); ++rn) {
        if (!(vals[rn] < Rational(0))) continue;
        std::vector<int> ap = active_set(rays[rp]);
        std::vector<int> an = active_set(rays[rn]);
        std::vector<int> common;
        std::set_intersection(ap.begin(), ap.end(), an.begin(), an.end(),
                              std::back_inserter(common));
        lin::QMat rows;
        for (int idx : common) rows.push_back(m[idx]);
        if (lin::rank(rows) != d - 2) continue;  // not adjacent
        lin::QVec combo(d);
        for (int j = 0; j < d; ++j) combo[j] = vals[rp] * rays[rn][j] - vals[rn] * rays[rp][j];
        next.push_back(primitive(combo));
      }
    }
    std::sort(next.begin(), next.end(), lex_less);
    next.erase(std::unique(next.begin(), next.end()), next.end());
    rays = std::move(next);
    processed.push_back(i);
    std::sort(processed.begin(), processed.end());
  }

  // Back to branch coordinates; every surviving ray satisfies x >= 0.
  std::vector<lin::QVec> out;
  for (const auto& c : rays) {
    lin::QVec x(cols, Rational(0));
    for (int i = 0; i < cols; ++i) {
      for (int j = 0; j < d; ++j) x[i] += kernel[j][i] * c[j];
    }
    bool nonzero = false;
    for (const auto& e : x) {
      if (!e.is_zero()) nonzero = true;
    }
    if (nonzero) out.push_back(primitive(x));
  }
  std::sort(out.begin(), out.end(), lex_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

MeasureCone::MeasureCone(const track::TrainTrack& t)
    : ambient_(static_cast<int>(t.branches.size())), constraints_(track::switch_matrix(t)) {}

MeasureCone::MeasureCone(lin::QMat constraints, int dim_ambient)
    : ambient_(dim_ambient), constraints_(std::move(constraints)) {}

void MeasureCone::restrict_to_span(const lin::QMat& span_rows) {
  // Membership in the span becomes extra equality rows via the annihilator.
  lin::QMat annihilator = lin::kernel_basis(span_rows, ambient_);
  for (const auto& z : annihilator) constraints_.push_back(z);
  restriction_ = span_rows;
  basis_.reset();
  rays_.reset();
}

const lin::QMat& MeasureCone::solution_basis() const {
  if (!basis_) basis_ = lin::kernel_basis(constraints_, ambient_);
  return *basis_;
}

const std::vector<lin::QVec>& MeasureCone::extreme_rays() const {
  if (!rays_) rays_ = cone::extreme_rays(constraints_, ambient_);
  return *rays_;
}

lin::QMat solution_space(const track::TrainTrack& t) {
  track::require_valid(t);
  return lin::kernel_basis(track::switch_matrix(t), static_cast<int>(t.branches.size()));
}

std::vector<WeightVector> vertex_cycles(const track::TrainTrack& t) {
  track::require_valid(t);
  std::vector<WeightVector> out;
  for (auto& ray :
       extreme_rays(track::switch_matrix(t), static_cast<int>(t.branches.size()))) {
    out.push_back(WeightVector{MeasureKind::Transverse, std::move(ray)});
  }
  return out;
}

bool is_recurrent(const track::TrainTrack& t) {
  auto rays = extreme_rays(track::switch_matrix(t), static_cast<int>(t.branches.size()));
  if (rays.empty()) return false;
  lin::QVec sum(rays[0].size(), Rational(0));
  for (const auto& r : rays) {
    for (std::size_t i = 0; i < r.size(); ++i) sum[i] += r[i];
  }
  for (const auto& e : sum) {
    if (!(e > Rational(0))) return false;
  }
  return true;
}

Rational total_mass(const lin::QVec& v) {
  Rational acc(0);
  for (const auto& e : v) acc += e;
  return acc;
}

lin::QVec normalize_mass(const lin::QVec& v) {
  Rational m = total_mass(v);
  if (m.is_zero()) fail(Err::ZeroMass, "weight vector has zero total mass");
  lin::QVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / m;
  return out;
}

Rational pairing(const lin::QVec& mu, const lin::QVec& nu) {
  if (mu.size() != nu.size()) fail(Err::BranchMismatch, "weight vectors on different branch sets");
  Rational acc(0);
  for (std::size_t i = 0; i < mu.size(); ++i) acc += mu[i] * nu[i];
  return acc;
}

Rational positivity_floor(const lin::QVec& mu) {
  Rational m = total_mass(mu);
  if (m.is_zero()) return Rational(0);
  Rational best = mu[0] / m;
  for (const auto& e : mu) {
    Rational q = e / m;
    if (q < best) best = q;
  }
  return best;
}

Rational min_ratio(const lin::QVec& mu, const lin::QVec& nu) {
  if (mu.size() != nu.size()) fail(Err::BranchMismatch, "weight vectors on different branch sets");
  if (total_mass(mu) != Rational(1) || total_mass(nu) != Rational(1)) {
    fail(Err::NotNormalized, "min_ratio expects unit-mass measures");
  }
  Rational best(1);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!(mu[i] > Rational(0)) || !(nu[i] > Rational(0))) {
      fail(Err::NotNormalized, "min_ratio expects positive measures");
    }
    Rational q1 = mu[i] / nu[i];
    Rational q2 = nu[i] / mu[i];
    if (q1 < best) best = q1;
    if (q2 < best) best = q2;
  }
  return best;
}

Rational finsler_norm(const lin::QVec& alpha, const lin::QVec& nu) {
  if (alpha.size() != nu.size()) fail(Err::BranchMismatch, "mismatched branch sets");
  Rational best(0);
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (!(nu[i] > Rational(0))) fail(Err::NonPositiveBase, "reference measure must be positive");
    Rational q = alpha[i].abs() / nu[i];
    if (q > best) best = q;
  }
  return best;
}

double total_mass(const lin::DVec& v) { return simd::sum(v.data(), v.size()); }

lin::DVec normalize_mass(const lin::DVec& v) {
  double m = total_mass(v);
  if (m == 0.0) fail(Err::ZeroMass, "weight vector has zero total mass");
  lin::DVec out = v;
  simd::scale(1.0 / m, out.data(), out.size());
  return out;
}

double pairing(const lin::DVec& mu, const lin::DVec& nu) {
  if (mu.size() != nu.size()) fail(Err::BranchMismatch, "weight vectors on different branch sets");
  return simd::dot(mu.data(), nu.data(), mu.size());
}

double positivity_floor(const lin::DVec& mu) {
  double m = total_mass(mu);
  if (m == 0.0) return 0.0;
  double best = mu[0] / m;
  for (double e : mu) best = std::min(best, e / m);
  return best;
}

double min_ratio(const lin::DVec& mu, const lin::DVec& nu, double mass_eps) {
  if (mu.size() != nu.size()) fail(Err::BranchMismatch, "weight vectors on different branch sets");
  if (std::abs(total_mass(mu) - 1.0) > mass_eps || std::abs(total_mass(nu) - 1.0) > mass_eps) {
    fail(Err::NotNormalized, "min_ratio expects unit-mass measures");
  }
  double a = simd::min_ratio(mu.data(), nu.data(), mu.size());
  double b = simd::min_ratio(nu.data(), mu.data(), mu.size());
  return std::min(a, b);
}

double finsler_norm(const lin::DVec& alpha, const lin::DVec& nu) {
  if (alpha.size() != nu.size()) fail(Err::BranchMismatch, "mismatched branch sets");
  for (double e : nu) {
    if (!(e > 0.0)) fail(Err::NonPositiveBase, "reference measure must be positive");
  }
  return simd::max_abs_ratio(alpha.data(), nu.data(), alpha.size());
}

std::string weights_to_json(const WeightVector& w) {
  nlohmann::ordered_json j;
  j["kind"] = w.kind == MeasureKind::Transverse
                  ? "transverse"
                  : (w.kind == MeasureKind::Tangential ? "tangential" : "signed-tangent");
  j["values"] = nlohmann::ordered_json::array();
  for (const auto& e : w.values) j["values"].push_back(e.str());
  return j.dump();
}

WeightVector weights_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& ex) {
    fail(Err::IoError, std::string("weight parse error: ") + ex.what());
  }
  WeightVector w;
  std::string kind = j.value("kind", "transverse");
  w.kind = kind == "tangential"
               ? MeasureKind::Tangential
               : (kind == "signed-tangent" ? MeasureKind::SignedTangent : MeasureKind::Transverse);
  for (const auto& e : j.at("values")) w.values.push_back(Rational::parse(e.get<std::string>()));
  return w;
}

}  // namespace ttlab::cone
