#pragma once

#include <cstdint>
#include <vector>

#include "ttlab/alphabet.hpp"
#include "ttlab/cells.hpp"
#include "ttlab/pf.hpp"

namespace ttlab::mix {

// Suspension semiflow over the truncated letter shift: one tower column per
// letter with the roof evaluated at the letter's fixed point, base masses
// from the invariant density, jumps Bernoulli across columns (the shift has
// no transition restriction).
struct SuspensionFlow {
  std::vector<double> roof;       // per letter, grid-aligned, >= r1 > 0
  std::vector<double> base_mass;  // per letter, sums to one
  double dt = 0.0;
  double r1 = 0.0;                 // roof lower bound
  double total_measure = 0.0;      // sum of mass * roof before normalization

  int columns() const { return static_cast<int>(roof.size()); }
  int slots(int x) const { return static_cast<int>(roof[x] / dt + 0.5); }
};

// Builds the flow from the alphabet: roofs log lambda1, base masses
// proportional to density(cell center) * vol(cell).
// GridTooFine when dt is below the resolution floor or a roof collapses to
// fewer than two slots... see also make_constant_flow for the negative
// control with a constant roof.
SuspensionFlow make_flow(const sym::AAlphabet& a, const pf::LetterSpectra& spectra,
                         const cells::Slice& slice, const cells::Mesh& mesh,
                         const cells::AcipResult& density, double dt, int volume_samples = 2000,
                         std::uint64_t seed = 1);

SuspensionFlow make_constant_flow(int letters, double roof_value, double dt);

// Cylinder observable: indicator of a letter set times a smooth bump in the
// flow direction, optionally centered to zero mean.
struct Observable {
  std::vector<int> letters;   // base cylinder (letter ids)
  double bump_center = 0.0;   // within [0, r1)
  double bump_width = 0.0;
  bool mean_zero = true;
};

// Pointwise value before centering.
double observable_value(const SuspensionFlow& flow, const Observable& f, int letter, double u);

double flow_integral(const SuspensionFlow& flow, const Observable& f);

struct CorrelationSeries {
  std::vector<double> t;
  std::vector<double> value;
};

// C(t) = int f . (g o flow_t) dpsi~ on the dt grid, by deterministic mass
// transport through the tower. NotMeanZero when a mean_zero observable
// fails to integrate to zero after centering; GridTooFine as in make_flow.
CorrelationSeries correlation(const SuspensionFlow& flow, const Observable& f,
                              const Observable& g, double t_max);

// Invariance diagnostic: max over grid t of |int g o flow_t - int g|.
double invariance_defect(const SuspensionFlow& flow, const Observable& g, double t_max);

struct DecayFit {
  double rate = 0.0;
  double r2 = 0.0;
  int peaks = 0;
};

// Least-squares fit of log |local maxima| of the series envelope.
DecayFit decay_rate_fit(const CorrelationSeries& series);

struct RoofReport {
  double r1 = 0.0;                  // inf of the roof over letters
  double r2 = 0.0;                  // sampled Lipschitz bound of omega o H^-1
  bool bounded_below = false;       // (1)
  bool lipschitz_ok = false;        // (2)
  bool eigendirections_distinct = false;
  bool periodic_sums_nonadditive = false;
  bool not_cohomologous = false;    // (3) = either of the two above
  double max_eigendirection_gap = 0.0;
  double max_additivity_defect = 0.0;
};

RoofReport good_roof_check(const sym::AAlphabet& a, const pf::LetterSpectra& spectra,
                           const cells::Slice& slice, int samples, double r2_cap = 1e6);

struct SkewReport {
  double kappa = 0.0;  // min contraction factor over samples (want > 1)
  double worst_pair_distance = 0.0;
  int samples = 0;
};

// Backward contraction on the dual (tangential) side through the transposed
// letter matrices.
SkewReport skew_contract_check(const sym::AAlphabet& a, int samples, std::uint64_t seed);

// CSV with header "t,C".
std::string correlation_csv(const CorrelationSeries& series);

// Minimal line plot for the CLI's optional SVG output.
std::string correlation_svg(const CorrelationSeries& series, int width = 640, int height = 320);

}  // namespace ttlab::mix
