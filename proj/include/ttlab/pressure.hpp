#pragma once

#include <vector>

#include "ttlab/linalg.hpp"

namespace ttlab::pressure {

// Shift model for the pressure machinery: per-letter roof values (evaluated
// at their fixed points) and a transition relation (empty = full shift).
struct ShiftModel {
  std::vector<double> omega;
  std::vector<std::vector<bool>> allowed;  // empty = no restriction

  bool transition(int x, int y) const {
    return allowed.empty() ? true : allowed[x][y];
  }
  int size() const { return static_cast<int>(omega.size()); }
};

struct PressureEstimate {
  double s = 0.0;
  int n_max = 0;
  std::vector<double> log_zn;  // anchored partition sums, n = 1..n_max
  double p_hat = 0.0;
  double band = 0.0;  // reported uncertainty of the extrapolation
};

// Gurevich pressure of -s*omega from anchored periodic partition sums,
// extrapolated from successive log-differences with Aitken acceleration.
PressureEstimate gurevich_pressure(const ShiftModel& model, double s, int anchor, int n_max);

struct TailReport {
  double delta_hat = 0.0;                  // root of the restricted pressure
  double threshold = 0.0;                  // the cut R
  std::vector<int> restricted;             // letters with omega > R
  std::vector<double> partial_sums;        // sum of e^{-delta omega} over nested caps
  std::vector<double> cap_increments;      // per-window tail increments
  bool increments_decreasing = false;
};

// Exponential-tail exponent: bisection root of the restricted pressure,
// then nested-cap partial sums of e^{-delta omega}.
// EmptyRestriction / NoSignChange on degenerate restrictions.
TailReport tail_exponent(const ShiftModel& model, double threshold, int caps = 4,
                         double tol = 1e-6);

}  // namespace ttlab::pressure
