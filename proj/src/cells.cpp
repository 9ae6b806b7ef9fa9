#include "ttlab/cells.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include "ttlab/cone.hpp"
#include "ttlab/error.hpp"
#include "ttlab/kernels.hpp"

namespace ttlab::cells {

lin::DVec Slice::embed(const lin::DVec& coords) const {
  lin::DVec out = center;
  for (std::size_t j = 0; j < frame.size(); ++j) {
    simd::axpy(coords[j], frame[j].data(), out.data(), out.size());
  }
  return out;
}

lin::DVec Slice::project(const lin::DVec& point) const {
  lin::DVec coords(frame.size(), 0.0);
  lin::DVec diff = point;
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= center[i];
  for (std::size_t j = 0; j < frame.size(); ++j) {
    coords[j] = simd::dot(frame[j].data(), diff.data(), diff.size());
  }
  return coords;
}

bool Slice::contains(const lin::DVec& point, double tol) const {
  for (const auto& row : ineq) {
    if (simd::dot(row.data(), point.data(), point.size()) < -tol) return false;
  }
  return true;
}

Slice make_slice(const track::TrainTrack& tau, const lin::QMat* restrict_span,
                 const lin::IMat* transform) {
  Slice s;
  s.tau = track::canonical_form(tau);
  cone::MeasureCone mc(s.tau);
  if (restrict_span != nullptr) mc.restrict_to_span(*restrict_span);
  auto rays = mc.extreme_rays();
  if (rays.empty()) fail(Err::DegenerateCell, "cone has no extreme rays");
  const int p = mc.ambient_dim();
  s.center.assign(p, 0.0);
  for (const auto& r : rays) {
    lin::QVec rq = transform != nullptr ? transform->apply(r) : r;
    lin::DVec d = cone::normalize_mass(lin::to_double(rq));
    simd::axpy(1.0 / rays.size(), d.data(), s.center.data(), p);
    s.rays.push_back(std::move(d));
  }
  // Orthonormal frame of the tangent directions (differences of rays) and of
  // the full span (rays themselves).
  std::vector<lin::DVec> diffs;
  for (std::size_t i = 1; i < s.rays.size(); ++i) {
    lin::DVec d(p);
    for (int j = 0; j < p; ++j) d[j] = s.rays[i][j] - s.rays[0][j];
    diffs.push_back(std::move(d));
  }
  s.frame = lin::orthonormal_rows(diffs);
  s.span = lin::orthonormal_rows(s.rays);
  s.qspan = mc.solution_basis();
  s.dim = static_cast<int>(s.frame.size());
  if (s.dim + 1 != static_cast<int>(s.span.size())) {
    // The mass functional is independent of the tangent space by
    // construction; mismatches mean a degenerate slice.
    fail(Err::DegenerateCell, "slice dimension mismatch");
  }
  // Facet functionals. The plain cone is cut out by the coordinate
  // inequalities; a transformed cone by the rows of the inverse transform.
  if (transform == nullptr) {
    for (int i = 0; i < p; ++i) {
      lin::DVec row(p, 0.0);
      row[i] = 1.0;
      s.ineq.push_back(std::move(row));
    }
  } else {
    lin::QMat inv;
    if (!lin::invert(transform->to_rational(), &inv)) {
      fail(Err::DegenerateCell, "slice transform not invertible");
    }
    for (const auto& qrow : inv) {
      lin::DVec row = lin::to_double(qrow);
      double norm = std::sqrt(simd::dot(row.data(), row.data(), row.size()));
      if (norm <= 0.0) fail(Err::DegenerateCell, "degenerate facet row");
      simd::scale(1.0 / norm, row.data(), row.size());
      s.ineq.push_back(std::move(row));
    }
  }
  return s;
}

Slice base_manifold(const sym::AAlphabet& a, const lin::QMat* restrict_span) {
  return make_slice(a.tau, restrict_span, &a.base_matrix);
}

HitAndRun::HitAndRun(const Slice& slice, std::uint64_t seed, int burn_factor)
    : slice_(slice), rng_(seed) {
  coords_.assign(slice_.dim, 0.0);  // barycenter
  for (int i = 0; i < burn_factor * std::max(1, slice_.dim); ++i) step();
}

void HitAndRun::step() {
  const int d = slice_.dim;
  if (d == 0) return;
  // Gaussian direction in frame coordinates.
  lin::DVec dir(d);
  double norm2 = 0.0;
  for (int j = 0; j < d; ++j) {
    double u1 = rng_.uniform();
    double u2 = rng_.uniform();
    while (u1 <= 0.0) u1 = rng_.uniform();
    dir[j] = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    norm2 += dir[j] * dir[j];
  }
  if (norm2 == 0.0) return;
  // Chord through the polytope along dir: bounds from every branch weight.
  lin::DVec point = slice_.embed(coords_);
  lin::DVec dvec(point.size(), 0.0);
  for (int j = 0; j < d; ++j) {
    simd::axpy(dir[j], slice_.frame[j].data(), dvec.data(), dvec.size());
  }
  double lo = -1e300, hi = 1e300;
  for (const auto& row : slice_.ineq) {
    double value = simd::dot(row.data(), point.data(), point.size());
    double slope = simd::dot(row.data(), dvec.data(), dvec.size());
    if (slope > 1e-300) {
      lo = std::max(lo, -value / slope);
    } else if (slope < -1e-300) {
      hi = std::min(hi, -value / slope);
    } else if (value < 0.0) {
      return;  // outside; should not happen
    }
  }
  if (!(lo < hi)) return;
  double t = lo + (hi - lo) * rng_.uniform();
  for (int j = 0; j < d; ++j) coords_[j] += t * dir[j];
}

lin::DVec HitAndRun::next() {
  step();
  return slice_.embed(coords_);
}

VolumeEstimate slice_volume(const Slice& slice, int samples, std::uint64_t seed) {
  VolumeEstimate est;
  est.samples = samples;
  const int d = slice.dim;
  if (d == 0) {
    est.value = 1.0;
    return est;
  }
  // Bounding box of the ray vertices in frame coordinates.
  std::vector<double> lo(d, 1e300), hi(d, -1e300);
  for (const auto& r : slice.rays) {
    lin::DVec c = slice.project(r);
    for (int j = 0; j < d; ++j) {
      lo[j] = std::min(lo[j], c[j]);
      hi[j] = std::max(hi[j], c[j]);
    }
  }
  double box = 1.0;
  for (int j = 0; j < d; ++j) box *= hi[j] - lo[j];
  Rng rng(seed);
  int hits = 0;
  lin::DVec c(d);
  for (int s = 0; s < samples; ++s) {
    for (int j = 0; j < d; ++j) c[j] = rng.uniform(lo[j], hi[j]);
    if (slice.contains(slice.embed(c))) ++hits;
  }
  double p_hat = static_cast<double>(hits) / samples;
  est.value = box * p_hat;
  est.std_error = box * std::sqrt(std::max(0.0, p_hat * (1.0 - p_hat) / samples));
  return est;
}

double restricted_log_det(const Slice& slice, const lin::IMat& b) {
  // Exact rational determinant of b on the span: the double route loses the
  // near-total cancellation of the dominant eigenvalue for long letters.
  const int m = static_cast<int>(slice.qspan.size());
  const int p = static_cast<int>(slice.center.size());
  if (m == 0) fail(Err::DegenerateCell, "slice has no rational span basis");
  // Coordinates of b * v_j in the basis {v_i}: solve V^T x = b v_j.
  lin::QMat vt(p, lin::QVec(m, Rational(0)));
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < m; ++j) vt[i][j] = slice.qspan[j][i];
  }
  lin::QMat rep(m, lin::QVec(m, Rational(0)));
  for (int j = 0; j < m; ++j) {
    lin::QVec img = b.apply(slice.qspan[j]);
    lin::QVec coords;
    if (!lin::solve(vt, img, &coords)) {
      fail(Err::DegenerateCell, "carrying matrix leaves the slice span");
    }
    for (int i = 0; i < m; ++i) rep[i][j] = coords[i];
  }
  Rational det = lin::det(rep);
  if (det.is_zero()) fail(Err::DegenerateCell, "carrying matrix is singular on the slice span");
  return std::log(std::fabs(det.to_double()));
}

VolumeEstimate cell_volume(const Slice& slice, const lin::IMat& b, double slice_vol, int samples,
                           std::uint64_t seed) {
  const int p = static_cast<int>(slice.center.size());
  const int dv = static_cast<int>(slice.span.size());
  double log_det = restricted_log_det(slice, b);
  std::vector<double> bd = b.to_double();
  HitAndRun sampler(slice, seed);
  double sum = 0.0, sum2 = 0.0;
  lin::DVec img(p);
  for (int s = 0; s < samples; ++s) {
    lin::DVec zeta = sampler.next();
    double mass = simd::sum(zeta.data(), p);
    simd::matvec(bd.data(), p, p, zeta.data(), img.data());
    double jac = std::exp(log_det + dv * (std::log(mass) - std::log(simd::sum(img.data(), p))));
    sum += jac;
    sum2 += jac * jac;
  }
  VolumeEstimate est;
  est.samples = samples;
  double mean = sum / samples;
  est.value = slice_vol * mean;
  double var = std::max(0.0, sum2 / samples - mean * mean);
  est.std_error = slice_vol * std::sqrt(var / samples);
  return est;
}

double jacobian_log_derivative_bound(const Slice& slice, const lin::IMat& b, int samples,
                                     std::uint64_t seed) {
  const int p = static_cast<int>(slice.center.size());
  const int dv = static_cast<int>(slice.span.size());
  std::vector<double> bd = b.to_double();
  HitAndRun sampler(slice, seed);
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  double bound = 0.0;
  lin::DVec img(p), imgv(p);
  for (int s = 0; s < samples; ++s) {
    lin::DVec zeta = sampler.next();
    // Random tangent direction, normalized in the sup-Finsler metric at zeta.
    lin::DVec v(p, 0.0);
    for (std::size_t j = 0; j < slice.frame.size(); ++j) {
      simd::axpy(rng.uniform(-1.0, 1.0), slice.frame[j].data(), v.data(), p);
    }
    double norm = cone::finsler_norm(v, zeta);
    if (norm <= 0.0) continue;
    simd::scale(1.0 / norm, v.data(), p);
    // g(zeta) = log Jacobian of the projective map; difference quotient.
    auto g = [&](const lin::DVec& z) {
      simd::matvec(bd.data(), p, p, z.data(), img.data());
      return dv * (std::log(simd::sum(z.data(), p)) - std::log(simd::sum(img.data(), p)));
    };
    const double eps = 1e-6;
    lin::DVec z2 = zeta;
    simd::axpy(eps, v.data(), z2.data(), p);
    if (!slice.contains(z2)) continue;
    bound = std::max(bound, std::fabs(g(z2) - g(zeta)) / eps);
  }
  return bound;
}

ExpansionStats expansion_stats(const Slice& slice, const lin::IMat& b, int samples,
                               std::uint64_t seed) {
  const int p = static_cast<int>(slice.center.size());
  std::vector<double> bd = b.to_double();
  HitAndRun sampler(slice, seed);
  Rng rng(seed ^ 0xdeadbeefcafef00dULL);
  ExpansionStats st;
  st.kappa = 1e300;
  st.c_max = 0.0;
  lin::DVec img(p), imgv(p);
  for (int s = 0; s < samples; ++s) {
    lin::DVec zeta = sampler.next();
    lin::DVec v(p, 0.0);
    for (std::size_t j = 0; j < slice.frame.size(); ++j) {
      simd::axpy(rng.uniform(-1.0, 1.0), slice.frame[j].data(), v.data(), p);
    }
    double vnorm = cone::finsler_norm(v, zeta);
    if (vnorm <= 0.0) continue;
    // Derivative of L(z) = Bz / mass(Bz) at zeta in direction v.
    simd::matvec(bd.data(), p, p, zeta.data(), img.data());
    simd::matvec(bd.data(), p, p, v.data(), imgv.data());
    double mz = simd::sum(img.data(), p);
    double mv = simd::sum(imgv.data(), p);
    lin::DVec lz(p), dl(p);
    for (int i = 0; i < p; ++i) {
      lz[i] = img[i] / mz;
      dl[i] = imgv[i] / mz - mv * img[i] / (mz * mz);
    }
    double wnorm = cone::finsler_norm(dl, lz);
    if (wnorm <= 0.0) continue;
    // H expands by the reciprocal of the contraction of L.
    double expansion = vnorm / wnorm;
    st.kappa = std::min(st.kappa, expansion);
    st.c_max = std::max(st.c_max, expansion);
  }
  return st;
}

PartitionReport partition_check(const Slice& slice, const sym::AAlphabet& a, int samples,
                                std::uint64_t seed, double tol) {
  const int p = static_cast<int>(slice.center.size());
  PartitionReport rep;
  // Membership: zeta in C(x) iff the full-path matrix (letter times base
  // loop) pulls zeta back into the cone. Inverses in double precision;
  // membership is tolerance-based either way.
  std::vector<std::vector<double>> inv_d;
  for (const auto& letter : a.letters) {
    lin::IMat full = letter.b_matrix * a.base_matrix;
    lin::DMat m(p, p);
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) m.at(i, j) = static_cast<double>(full.at(i, j));
    }
    std::vector<double> flat(static_cast<std::size_t>(p) * p);
    for (int col = 0; col < p; ++col) {
      lin::DVec e(p, 0.0), x;
      e[col] = 1.0;
      if (!lin::lu_solve(m, e, &x)) {
        fail(Err::DegenerateCell, "letter matrix not invertible");
      }
      for (int row = 0; row < p; ++row) flat[static_cast<std::size_t>(row) * p + col] = x[row];
    }
    inv_d.push_back(std::move(flat));
  }
  // The truncated cells are exponentially small, so uniform samples of the
  // slice essentially never land in them. Instead each cell is sampled
  // through its own inverse branch; the partition claim is that such a point
  // belongs to its own cell and to no other.
  HitAndRun sampler(slice, seed);
  lin::DVec pre(p), img(p);
  const int per_letter = std::max(1, samples / std::max(1, static_cast<int>(a.letters.size())));
  for (std::size_t li = 0; li < a.letters.size(); ++li) {
    std::vector<double> bd = a.letters[li].b_matrix.to_double();
    for (int s = 0; s < per_letter; ++s) {
      lin::DVec base = sampler.next();
      simd::matvec(bd.data(), p, p, base.data(), img.data());
      lin::DVec zeta = cone::normalize_mass(img);
      int hits = 0;
      bool own = false;
      for (std::size_t lj = 0; lj < inv_d.size(); ++lj) {
        simd::matvec(inv_d[lj].data(), p, p, zeta.data(), pre.data());
        // Relative positivity: the pullback lands at 1/lambda scale.
        double total = simd::sum(pre.data(), p);
        bool inside = total > 0.0;
        for (int i = 0; inside && i < p; ++i) {
          if (pre[i] < tol * total) inside = false;
        }
        if (inside) {
          ++hits;
          if (lj == li) own = true;
        }
      }
      ++rep.samples;
      if (hits == 0 || !own) {
        ++rep.uncovered;
      } else if (hits == 1) {
        ++rep.unique;
      } else {
        ++rep.overlapped;
      }
    }
  }
  return rep;
}

namespace {

double simplex_volume(const Mesh& mesh, const std::vector<int>& simplex) {
  const int d = mesh.dim;
  lin::DMat m(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      m.at(i, j) = mesh.nodes[simplex[j + 1]][i] - mesh.nodes[simplex[0]][i];
    }
  }
  double fact = 1.0;
  for (int i = 2; i <= d; ++i) fact *= i;
  return std::fabs(lin::lu_det(m)) / fact;
}

void refine(Mesh* mesh) {
  // Midpoint (red) refinement for segments and triangles; octasection
  // companion diagonal for tetrahedra.
  std::map<std::pair<int, int>, int> midpoints;
  auto mid = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = midpoints.find(key);
    if (it != midpoints.end()) return it->second;
    lin::DVec m(mesh->dim);
    for (int i = 0; i < mesh->dim; ++i) {
      m[i] = 0.5 * (mesh->nodes[a][i] + mesh->nodes[b][i]);
    }
    int id = static_cast<int>(mesh->nodes.size());
    mesh->nodes.push_back(std::move(m));
    midpoints[key] = id;
    return id;
  };
  std::vector<std::vector<int>> out;
  for (const auto& s : *(&mesh->simplices)) {
    if (mesh->dim == 1) {
      int m01 = mid(s[0], s[1]);
      out.push_back({s[0], m01});
      out.push_back({m01, s[1]});
    } else if (mesh->dim == 2) {
      int m01 = mid(s[0], s[1]), m12 = mid(s[1], s[2]), m02 = mid(s[0], s[2]);
      out.push_back({s[0], m01, m02});
      out.push_back({m01, s[1], m12});
      out.push_back({m02, m12, s[2]});
      out.push_back({m01, m12, m02});
    } else {
      int m01 = mid(s[0], s[1]), m02 = mid(s[0], s[2]), m03 = mid(s[0], s[3]);
      int m12 = mid(s[1], s[2]), m13 = mid(s[1], s[3]), m23 = mid(s[2], s[3]);
      out.push_back({s[0], m01, m02, m03});
      out.push_back({s[1], m01, m12, m13});
      out.push_back({s[2], m02, m12, m23});
      out.push_back({s[3], m03, m13, m23});
      out.push_back({m01, m02, m03, m13});
      out.push_back({m01, m02, m12, m13});
      out.push_back({m02, m03, m13, m23});
      out.push_back({m02, m12, m13, m23});
    }
  }
  mesh->simplices = std::move(out);
}

}  // namespace

int Mesh::locate(const lin::DVec& coords, lin::DVec* bary, double tol) const {
  const int d = dim;
  for (std::size_t s = 0; s < simplices.size(); ++s) {
    const auto& simplex = simplices[s];
    // Solve for barycentric coordinates.
    lin::DMat m(d, d);
    lin::DVec rhs(d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        m.at(i, j) = nodes[simplex[j + 1]][i] - nodes[simplex[0]][i];
      }
      rhs[i] = coords[i] - nodes[simplex[0]][i];
    }
    lin::DVec lambda;
    if (!lin::lu_solve(m, rhs, &lambda)) continue;
    double l0 = 1.0;
    bool ok = true;
    for (int j = 0; j < d; ++j) {
      if (lambda[j] < -tol) ok = false;
      l0 -= lambda[j];
    }
    if (!ok || l0 < -tol) continue;
    bary->assign(d + 1, 0.0);
    (*bary)[0] = l0;
    for (int j = 0; j < d; ++j) (*bary)[j + 1] = lambda[j];
    return static_cast<int>(s);
  }
  return -1;
}

double Mesh::interpolate(const std::vector<double>& nodal, const lin::DVec& coords) const {
  lin::DVec bary;
  int s = locate(coords, &bary, 1e-7);
  if (s < 0) return 0.0;
  double acc = 0.0;
  for (std::size_t j = 0; j < bary.size(); ++j) acc += bary[j] * nodal[simplices[s][j]];
  return acc;
}

Mesh make_mesh(const Slice& slice, int refine_levels) {
  const int d = slice.dim;
  if (d < 1 || d > 3) {
    fail(Err::DimensionTooHigh, "mesh supports slice dimensions 1..3, got " + std::to_string(d));
  }
  Mesh mesh;
  mesh.dim = d;
  // Vertices in frame coordinates.
  std::vector<lin::DVec> verts;
  for (const auto& r : slice.rays) verts.push_back(slice.project(r));

  if (d == 1) {
    // Extremes along the single axis.
    int lo = 0, hi = 0;
    for (std::size_t i = 1; i < verts.size(); ++i) {
      if (verts[i][0] < verts[lo][0]) lo = static_cast<int>(i);
      if (verts[i][0] > verts[hi][0]) hi = static_cast<int>(i);
    }
    mesh.nodes = {verts[lo], verts[hi]};
    mesh.simplices = {{0, 1}};
  } else if (d == 2) {
    // Convex polygon: order by angle around the centroid, fan from node 0.
    lin::DVec c(2, 0.0);
    for (const auto& v : verts) {
      c[0] += v[0] / verts.size();
      c[1] += v[1] / verts.size();
    }
    std::vector<int> order(verts.size());
    for (std::size_t i = 0; i < verts.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::atan2(verts[a][1] - c[1], verts[a][0] - c[0]) <
             std::atan2(verts[b][1] - c[1], verts[b][0] - c[0]);
    });
    for (int idx : order) mesh.nodes.push_back(verts[idx]);
    for (std::size_t i = 1; i + 1 < mesh.nodes.size(); ++i) {
      mesh.simplices.push_back({0, static_cast<int>(i), static_cast<int>(i + 1)});
    }
  } else {
    // Small 3D point sets: brute-force hull facets, then a fan from the
    // centroid so non-simplicial hulls stay covered.
    const int n = static_cast<int>(verts.size());
    lin::DVec c(3, 0.0);
    for (const auto& v : verts) {
      for (int i = 0; i < 3; ++i) c[i] += v[i] / n;
    }
    int cid = n;
    mesh.nodes = verts;
    mesh.nodes.push_back(c);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
          // Plane through i,j,k: facet when all points lie on one side.
          double ux = verts[j][0] - verts[i][0], uy = verts[j][1] - verts[i][1],
                 uz = verts[j][2] - verts[i][2];
          double vx = verts[k][0] - verts[i][0], vy = verts[k][1] - verts[i][1],
                 vz = verts[k][2] - verts[i][2];
          double nx = uy * vz - uz * vy, ny = uz * vx - ux * vz, nz = ux * vy - uy * vx;
          double nn = std::sqrt(nx * nx + ny * ny + nz * nz);
          if (nn < 1e-12) continue;
          int pos = 0, neg = 0;
          for (int t = 0; t < n; ++t) {
            double side = nx * (verts[t][0] - verts[i][0]) + ny * (verts[t][1] - verts[i][1]) +
                          nz * (verts[t][2] - verts[i][2]);
            if (side > 1e-10) ++pos;
            if (side < -1e-10) ++neg;
          }
          if (pos > 0 && neg > 0) continue;
          mesh.simplices.push_back({i, j, k, cid});
        }
      }
    }
    if (mesh.simplices.empty()) fail(Err::DegenerateCell, "hull construction failed");
  }

  for (int l = 0; l < refine_levels; ++l) refine(&mesh);

  // Drop zero-volume simplices (degenerate fan pieces) and accumulate the
  // nodal quadrature weights.
  std::vector<std::vector<int>> keep;
  for (const auto& s : mesh.simplices) {
    if (simplex_volume(mesh, s) > 1e-14) keep.push_back(s);
  }
  mesh.simplices = std::move(keep);
  mesh.lumped_volume.assign(mesh.nodes.size(), 0.0);
  for (const auto& s : mesh.simplices) {
    double v = simplex_volume(mesh, s) / (mesh.dim + 1);
    for (int id : s) mesh.lumped_volume[id] += v;
  }
  return mesh;
}

std::vector<InverseBranch> letter_branches(const Slice& slice, const sym::AAlphabet& a) {
  std::vector<InverseBranch> out;
  auto sp = std::make_shared<Slice>(slice);
  const int p = static_cast<int>(slice.center.size());
  const int dv = static_cast<int>(slice.span.size());
  for (const auto& letter : a.letters) {
    std::vector<double> bd = letter.b_matrix.to_double();
    double log_det = restricted_log_det(slice, letter.b_matrix);
    auto map = [sp, bd, p](const lin::DVec& coords) {
      lin::DVec zeta = sp->embed(coords);
      lin::DVec img(p);
      simd::matvec(bd.data(), p, p, zeta.data(), img.data());
      return sp->project(cone::normalize_mass(img));
    };
    auto jac = [sp, bd, p, dv, log_det](const lin::DVec& coords) {
      lin::DVec zeta = sp->embed(coords);
      lin::DVec img(p);
      simd::matvec(bd.data(), p, p, zeta.data(), img.data());
      double mass = simd::sum(img.data(), p) / simd::sum(zeta.data(), p);
      return std::exp(log_det - dv * std::log(mass));
    };
    out.push_back({std::move(map), std::move(jac)});
  }
  return out;
}

AcipResult acip(const Mesh& mesh, const std::vector<InverseBranch>& branches, int max_iter,
                double tol) {
  const std::size_t n = mesh.nodes.size();
  double total_volume = 0.0;
  for (double v : mesh.lumped_volume) total_volume += v;

  // Precompute image points and Jacobians at the nodes: the operator is a
  // fixed linear map on nodal values.
  struct Stencil {
    int simplex = -1;
    lin::DVec bary;
    double jac = 0.0;
  };
  std::vector<std::vector<Stencil>> stencils(branches.size(), std::vector<Stencil>(n));
  for (std::size_t b = 0; b < branches.size(); ++b) {
    for (std::size_t i = 0; i < n; ++i) {
      Stencil st;
      lin::DVec img = branches[b].map(mesh.nodes[i]);
      st.simplex = mesh.locate(img, &st.bary, 1e-7);
      st.jac = branches[b].jacobian(mesh.nodes[i]);
      stencils[b][i] = std::move(st);
    }
  }

  std::vector<double> f(n, 1.0 / total_volume), next(n);
  AcipResult res;
  for (res.iterations = 1; res.iterations <= max_iter; ++res.iterations) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t b = 0; b < branches.size(); ++b) {
      for (std::size_t i = 0; i < n; ++i) {
        const Stencil& st = stencils[b][i];
        if (st.simplex < 0) continue;
        double fv = 0.0;
        const auto& simplex = mesh.simplices[st.simplex];
        for (std::size_t j = 0; j < st.bary.size(); ++j) fv += st.bary[j] * f[simplex[j]];
        next[i] += st.jac * fv;
      }
    }
    // Renormalize to unit mass (the truncated branch family is sub-Markov).
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) mass += next[i] * mesh.lumped_volume[i];
    if (mass <= 0.0) fail(Err::NoConvergence, "density mass collapsed");
    for (auto& e : next) e /= mass;
    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i) resid = std::max(resid, std::fabs(next[i] - f[i]));
    f = next;
    if (resid < tol) {
      res.residual = resid;
      break;
    }
    res.residual = resid;
  }
  if (res.residual >= tol) fail(Err::NoConvergence, "transfer operator did not settle");
  res.density = std::move(f);
  res.min_density = 1e300;
  res.max_density = 0.0;
  for (double e : res.density) {
    res.min_density = std::min(res.min_density, e);
    res.max_density = std::max(res.max_density, e);
  }
  return res;
}

}  // namespace ttlab::cells
