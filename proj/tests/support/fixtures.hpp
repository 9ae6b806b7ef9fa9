#pragma once

#include <optional>
#include <string>

#include "ttlab/alphabet.hpp"
#include "ttlab/rng.hpp"
#include "ttlab/track.hpp"

namespace ttlab::fixtures {

// Shared symbolic fixtures, built once per test binary. The S alphabet is
// the two-class alphabet of the punctured genus-one track; the A alphabet
// its first-return alphabet at class 0.
const sym::SAlphabet& shared_alphabet();
const sym::AAlphabet& shared_a_alphabet();

std::string fixture_path(const std::string& name);
track::TrainTrack load(const std::string& name);

// Two trivalent switches joined by three parallel branches; rejected by the
// validator (its faces are discs with too few cusps) but its switch-condition
// cone is the standard 2-ray example.
track::TrainTrack theta_track();

// A deliberately broken single-switch document for error-path tests.
track::TrainTrack malformed_no_large();

struct SearchTarget {
  int switches = 8;
  std::vector<int> disc_degrees;  // expected unpunctured cusp-2 degrees, sorted
  int punctures = 0;
  int genus = 0;
  bool orientable = false;
  int solution_dim = -1;  // -1 = no constraint
  int max_large = 99;     // cap on number of large branches (keeps graphs small)
};

// Random search for a valid recurrent track of the given topology. Returns
// nothing if the attempt budget is exhausted.
std::optional<track::TrainTrack> search_track(const SearchTarget& target, std::uint64_t seed,
                                              int attempts);

}  // namespace ttlab::fixtures
