#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ttlab/linalg.hpp"
#include "ttlab/track.hpp"

namespace ttlab::cone {

enum class MeasureKind { Transverse, Tangential, SignedTangent };

// Branch weight function indexed by branch number - 1; exact lane.
struct WeightVector {
  MeasureKind kind = MeasureKind::Transverse;
  lin::QVec values;
};

// Switch-condition cone of a track with an optional linear restriction,
// extreme rays cached after the first computation.
class MeasureCone {
 public:
  explicit MeasureCone(const track::TrainTrack& t);
  MeasureCone(lin::QMat constraints, int dim_ambient);

  // Restrict to a linear subspace given by spanning rows; the cone becomes
  // {x >= 0} intersected with (kernel of constraints) and that span.
  void restrict_to_span(const lin::QMat& span_rows);

  int ambient_dim() const { return ambient_; }
  const lin::QMat& constraints() const { return constraints_; }
  // Basis rows of the solution space (kernel of the constraint matrix,
  // intersected with the restriction when present).
  const lin::QMat& solution_basis() const;
  int dim() const { return static_cast<int>(solution_basis().size()); }
  // Extreme rays, primitive integer vectors, lexicographically sorted.
  const std::vector<lin::QVec>& extreme_rays() const;

 private:
  int ambient_ = 0;
  lin::QMat constraints_;
  std::optional<lin::QMat> restriction_;
  mutable std::optional<lin::QMat> basis_;
  mutable std::optional<std::vector<lin::QVec>> rays_;
};

// Extreme rays of {x >= 0, a x = 0} by double description, exact arithmetic,
// lexicographically sorted primitive integer output.
std::vector<lin::QVec> extreme_rays(const lin::QMat& a, int cols);

// Kernel basis of the switch conditions (rows as basis vectors).
lin::QMat solution_space(const track::TrainTrack& t);

std::vector<WeightVector> vertex_cycles(const track::TrainTrack& t);

// A track is recurrent when some transverse measure is positive everywhere,
// equivalently when the sum of the extreme rays is.
bool is_recurrent(const track::TrainTrack& t);

// --- exact lane -----------------------------------------------------------

Rational total_mass(const lin::QVec& v);
lin::QVec normalize_mass(const lin::QVec& v);          // ZeroMass
Rational pairing(const lin::QVec& mu, const lin::QVec& nu);  // BranchMismatch
Rational positivity_floor(const lin::QVec& mu);
Rational min_ratio(const lin::QVec& mu, const lin::QVec& nu);       // NotNormalized
Rational finsler_norm(const lin::QVec& alpha, const lin::QVec& nu);  // NonPositiveBase

// --- float lane (SIMD kernels underneath) ----------------------------------

double total_mass(const lin::DVec& v);
lin::DVec normalize_mass(const lin::DVec& v);
double pairing(const lin::DVec& mu, const lin::DVec& nu);
double positivity_floor(const lin::DVec& mu);
double min_ratio(const lin::DVec& mu, const lin::DVec& nu, double mass_eps = 1e-9);
double finsler_norm(const lin::DVec& alpha, const lin::DVec& nu);

// WeightVector serialization: branch-number-indexed array of "p/q" strings.
std::string weights_to_json(const WeightVector& w);
WeightVector weights_from_json(const std::string& text);

}  // namespace ttlab::cone
