#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ttlab/alphabet.hpp"
#include "ttlab/linalg.hpp"
#include "ttlab/rng.hpp"

namespace ttlab::cells {

// Mass-one slice of a weight cone: the polytope spanned by the normalized
// extreme rays, with an orthonormal frame of its tangent space.
struct Slice {
  track::TrainTrack tau;
  std::vector<lin::DVec> rays;   // normalized extreme points
  lin::DVec center;              // barycenter of the rays
  std::vector<lin::DVec> frame;  // orthonormal tangent basis (mass-zero directions)
  std::vector<lin::DVec> span;   // orthonormal basis of the full solution span
  lin::QMat qspan;               // exact rational basis rows of the span
  std::vector<lin::DVec> ineq;   // unit facet functionals: x inside iff all >= 0
  int dim = 0;                   // polytope dimension = span.size() - 1

  lin::DVec embed(const lin::DVec& coords) const;    // frame coords -> branch weights
  lin::DVec project(const lin::DVec& point) const;   // branch weights -> frame coords
  bool contains(const lin::DVec& point, double tol = 1e-9) const;
};

// restrict_span: optional linear restriction (rows spanning a subspace of
// branch-weight space); the slice is then built inside that subspace.
// transform: optional positive carrying matrix applied to the cone first;
// the base manifold of the coding is the carried image of the marked loop,
// not the full normalized cone.
Slice make_slice(const track::TrainTrack& tau, const lin::QMat* restrict_span = nullptr,
                 const lin::IMat* transform = nullptr);

// The base manifold C of an A alphabet: the marked loop's carried image.
Slice base_manifold(const sym::AAlphabet& a, const lin::QMat* restrict_span = nullptr);

// Uniform sampler on the slice polytope: hit-and-run with burn-in
// proportional to the dimension.
class HitAndRun {
 public:
  HitAndRun(const Slice& slice, std::uint64_t seed, int burn_factor = 10);
  lin::DVec next();  // branch-coordinate point

 private:
  const Slice& slice_;
  Rng rng_;
  lin::DVec coords_;  // frame coordinates of the current point
  void step();
};

struct VolumeEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int samples = 0;
};

// Polytope volume by rejection from the frame-coordinate bounding box.
VolumeEstimate slice_volume(const Slice& slice, int samples, std::uint64_t seed);

// log |det B| restricted to the solution span; DegenerateCell when singular.
double restricted_log_det(const Slice& slice, const lin::IMat& b);

// vol(C(x)) = vol(C) * E[Jacobian of the projective map] over uniform
// samples of the slice.
VolumeEstimate cell_volume(const Slice& slice, const lin::IMat& b, double slice_vol, int samples,
                           std::uint64_t seed);

// Sampled sup-norm of the derivative of log J(x) compose H_x^{-1} in the
// sup-Finsler metric (difference quotients along tangent directions).
double jacobian_log_derivative_bound(const Slice& slice, const lin::IMat& b, int samples,
                                     std::uint64_t seed);

// Sampled expansion range of H_x in the sup-Finsler metric: the inverse
// branch L_x contracts by kappa..c, so H_x expands by the reciprocals.
struct ExpansionStats {
  double kappa = 0.0;  // min expansion (must exceed 1)
  double c_max = 0.0;  // max expansion
};
ExpansionStats expansion_stats(const Slice& slice, const lin::IMat& b, int samples,
                               std::uint64_t seed);

// How many of the sampled points land in zero / one / several letter cells.
struct PartitionReport {
  int samples = 0;
  int uncovered = 0;  // outside every (truncated) letter cell
  int unique = 0;
  int overlapped = 0;  // in at least two cells
};
PartitionReport partition_check(const Slice& slice, const sym::AAlphabet& a, int samples,
                                std::uint64_t seed, double tol = 1e-9);

// Simplicial mesh over the slice polytope (dimensions 1..3).
struct Mesh {
  std::vector<lin::DVec> nodes;            // frame coordinates
  std::vector<std::vector<int>> simplices;  // dim+1 node ids each
  std::vector<double> lumped_volume;       // nodal quadrature weights
  int dim = 0;

  // Barycentric location; returns simplex id or -1.
  int locate(const lin::DVec& coords, lin::DVec* bary, double tol = 1e-9) const;
  double interpolate(const std::vector<double>& nodal, const lin::DVec& coords) const;
};

Mesh make_mesh(const Slice& slice, int refine_levels);  // DimensionTooHigh over 3

// Inverse branch of an expanding map on the slice, in frame coordinates.
struct InverseBranch {
  std::function<lin::DVec(const lin::DVec&)> map;  // slice coords -> slice coords
  std::function<double(const lin::DVec&)> jacobian;
};

std::vector<InverseBranch> letter_branches(const Slice& slice, const sym::AAlphabet& a);

struct AcipResult {
  std::vector<double> density;  // nodal values, integral one
  double residual = 0.0;
  int iterations = 0;
  double min_density = 0.0;
  double max_density = 0.0;
};

// Transfer-operator iteration from the uniform density on the mesh;
// NoConvergence when the residual does not reach tol.
AcipResult acip(const Mesh& mesh, const std::vector<InverseBranch>& branches, int max_iter,
                double tol);

}  // namespace ttlab::cells
