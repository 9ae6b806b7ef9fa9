#include <cmath>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "ttlab/pf.hpp"
#include "ttlab/pressure.hpp"

using namespace ttlab;

TEST_CASE("constant-roof full shift reproduces the analytic pressure") {
  pressure::ShiftModel model;
  model.omega = {2.0, 2.0, 2.0};
  for (double s : {0.0, 0.25, 0.5493, 1.0}) {
    auto est = pressure::gurevich_pressure(model, s, 0, 12);
    CHECK(std::fabs(est.p_hat - (std::log(3.0) - 2.0 * s)) < 1e-6);
  }
  CHECK_THROWS_AS(pressure::gurevich_pressure(model, 0.5, 7, 12), Error);
}

TEST_CASE("single letter gives P(s) = -s") {
  pressure::ShiftModel model;
  model.omega = {1.0};
  for (double s : {0.1, 0.7, 2.0}) {
    auto est = pressure::gurevich_pressure(model, s, 0, 10);
    CHECK(std::fabs(est.p_hat + s) < 1e-9);
  }
}

TEST_CASE("pressure decreases strictly in s on the fixture alphabet") {
  const auto& aa = fixtures::shared_a_alphabet();
  auto spectra = pf::letter_spectra(aa);
  pressure::ShiftModel model;
  model.omega = spectra.log_lambda1;
  double prev = 1e300;
  for (double s : {0.0, 0.3, 0.6, 0.9, 1.2, 1.5}) {
    auto est = pressure::gurevich_pressure(model, s, 0, 12);
    CHECK(est.p_hat < prev);
    prev = est.p_hat;
  }
}

TEST_CASE("tail exponent of the constant-roof full shift") {
  pressure::ShiftModel model;
  model.omega = {2.0, 2.0, 2.0};
  auto rep = pressure::tail_exponent(model, 1.0, 3, 1e-7);
  CHECK(std::fabs(rep.delta_hat - std::log(3.0) / 2.0) < 1e-5);
  CHECK(rep.restricted.size() == 3);
}

TEST_CASE("degenerate restrictions are rejected") {
  pressure::ShiftModel model;
  model.omega = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(pressure::tail_exponent(model, 5.0), Error);   // empty restriction
  CHECK_THROWS_AS(pressure::tail_exponent(model, 2.5), Error);   // single letter
}

TEST_CASE("fixture alphabet has a positive tail exponent") {
  const auto& aa = fixtures::shared_a_alphabet();
  auto spectra = pf::letter_spectra(aa);
  pressure::ShiftModel model;
  model.omega = spectra.log_lambda1;
  // Threshold at the 20th percentile of omega.
  std::vector<double> sorted = model.omega;
  std::sort(sorted.begin(), sorted.end());
  double r = sorted[sorted.size() / 5];
  auto rep = pressure::tail_exponent(model, r, 4, 1e-6);
  CHECK(rep.delta_hat > 0.0);
  CHECK(rep.partial_sums.size() == 4);
  CHECK(rep.increments_decreasing);
}
