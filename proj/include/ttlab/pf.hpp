#pragma once

#include <cstdint>
#include <vector>

#include "ttlab/alphabet.hpp"
#include "ttlab/linalg.hpp"

namespace ttlab::pf {

struct PFResult {
  double lambda1 = 0.0;
  lin::DVec right;  // positive, unit total mass
  lin::DVec left;   // positive, normalized so <left, right> = 1
  double gap = 0.0;  // lambda1 - |lambda2| estimate from the iteration
  int iterations = 0;
};

// Power iteration on the cone spanned by `rays` (standard basis when empty).
// NotPrimitive when no power of the matrix is positive on the cone.
PFResult pf_eigen(const lin::IMat& b, const std::vector<lin::DVec>& rays = {},
                  double tol = 1e-12, int max_iter = 200000);

bool is_primitive_on(const lin::IMat& b, const std::vector<lin::DVec>& rays);

// Per-letter eigenvalue data for an A alphabet.
struct LetterSpectra {
  std::vector<double> log_lambda1;
  std::vector<PFResult> eigen;
};
LetterSpectra letter_spectra(const sym::AAlphabet& a);

// Corpus-wide band of e^{omega(mu)} / lambda1 over sampled cell points, with
// the trend of the per-letter band versus word length.
struct BandReport {
  double chi_hat = 1.0;        // max of ratio and reciprocal over everything
  double trend_slope = 0.0;    // log per-letter band vs word length
  double trend_r2 = 0.0;
  std::vector<double> per_letter_band;
};
BandReport eigen_band(const sym::AAlphabet& a, const LetterSpectra& spectra, int samples,
                      std::uint64_t seed);

}  // namespace ttlab::pf
