#include "support/fixtures.hpp"

#include <algorithm>
#include <numeric>

#include "ttlab/cone.hpp"

#ifndef TTLAB_FIXTURE_DIR
#define TTLAB_FIXTURE_DIR "fixtures"
#endif

namespace ttlab::fixtures {

using track::Branch;
using track::HalfRef;
using track::SlotRef;
using track::Switch;
using track::TrainTrack;

std::string fixture_path(const std::string& name) {
  return std::string(TTLAB_FIXTURE_DIR) + "/" + name;
}

const sym::SAlphabet& shared_alphabet() {
  static sym::SAlphabet a = [] {
    sym::SBuildParams params;
    params.classes = 2;
    return sym::build_alphabet_S(load("genus1_type2_m2.tt"), params);
  }();
  return a;
}

const sym::AAlphabet& shared_a_alphabet() {
  static sym::AAlphabet a = sym::build_alphabet_A(shared_alphabet(), 0, 6, 200);
  return a;
}

track::TrainTrack load(const std::string& name) { return track::load_tt_file(fixture_path(name)); }

TrainTrack theta_track() {
  TrainTrack t;
  t.genus = 2;  // declared surface data is irrelevant; faces are forbidden anyway
  t.punctures = 0;
  t.switches.resize(2);
  t.branches.resize(3);
  for (int b = 0; b < 3; ++b) {
    t.branches[b].number = b + 1;
    t.branches[b].ends[0] = SlotRef{0, b};
    t.branches[b].ends[1] = SlotRef{1, b};
    t.switches[0].slots[b] = HalfRef{b, 0};
    t.switches[1].slots[b] = HalfRef{b, 1};
  }
  t.switches[0].large_slot = 0;
  t.switches[1].large_slot = 0;
  return t;
}

track::TrainTrack malformed_no_large() {
  TrainTrack t = theta_track();
  t.switches[0].large_slot = -1;  // all three slots declared small
  return t;
}

namespace {

// Random trivalent ribbon structure. When `oriented` is set the switches are
// split evenly into mergers and splitters and branches pair an outgoing half
// with an incoming half, which makes the track orientable by construction.
TrainTrack random_candidate(Rng& rng, int v, bool oriented) {
  const int e = 3 * v / 2;
  TrainTrack t;
  t.switches.resize(v);
  t.branches.resize(e);
  for (auto& sw : t.switches) sw.large_slot = 0;

  if (oriented) {
    std::vector<int> kind(v, 0);  // 1 = merger (large half outgoing), 0 = splitter
    for (int i = 0; i < v / 2; ++i) kind[i] = 1;
    for (int i = v - 1; i > 0; --i) std::swap(kind[i], kind[rng.below(i + 1)]);
    std::vector<SlotRef> outgoing, incoming;
    for (int s = 0; s < v; ++s) {
      if (kind[s] == 1) {
        outgoing.push_back(SlotRef{s, 0});
        incoming.push_back(SlotRef{s, 1});
        incoming.push_back(SlotRef{s, 2});
      } else {
        incoming.push_back(SlotRef{s, 0});
        outgoing.push_back(SlotRef{s, 1});
        outgoing.push_back(SlotRef{s, 2});
      }
    }
    for (int i = static_cast<int>(incoming.size()) - 1; i > 0; --i) {
      std::swap(incoming[i], incoming[rng.below(i + 1)]);
    }
    for (int b = 0; b < e; ++b) {
      t.branches[b].number = b + 1;
      t.branches[b].ends[0] = outgoing[b];
      t.branches[b].ends[1] = incoming[b];
      t.switches[outgoing[b].sw].slots[outgoing[b].slot] = HalfRef{b, 0};
      t.switches[incoming[b].sw].slots[incoming[b].slot] = HalfRef{b, 1};
    }
  } else {
    std::vector<SlotRef> slots;
    for (int s = 0; s < v; ++s) {
      for (int k = 0; k < 3; ++k) slots.push_back(SlotRef{s, k});
    }
    for (int i = static_cast<int>(slots.size()) - 1; i > 0; --i) {
      std::swap(slots[i], slots[rng.below(i + 1)]);
    }
    for (int b = 0; b < e; ++b) {
      t.branches[b].number = b + 1;
      t.branches[b].ends[0] = slots[2 * b];
      t.branches[b].ends[1] = slots[2 * b + 1];
      for (int end = 0; end < 2; ++end) {
        SlotRef r = t.branches[b].ends[end];
        t.switches[r.sw].slots[r.slot] = HalfRef{b, end};
      }
    }
  }
  return t;
}

}  // namespace

std::optional<track::TrainTrack> search_track(const SearchTarget& target, std::uint64_t seed,
                                              int attempts) {
  Rng rng(seed);
  for (int it = 0; it < attempts; ++it) {
    TrainTrack t = random_candidate(rng, target.switches, target.orientable);
    t.genus = target.genus;
    t.punctures = target.punctures;

    // Mark every monogon face punctured; candidates whose puncture pattern
    // does not match the target fail the type check below.
    auto faces = track::trace_faces(t);
    for (const auto& f : faces) {
      if (f.cusps == 1) {
        t.punctured_faces.push_back(*std::min_element(f.corners.begin(), f.corners.end()));
      }
    }
    if (static_cast<int>(t.punctured_faces.size()) != target.punctures) continue;

    auto rep = track::validate(t);
    if (!rep.ok) continue;
    try {
      auto type = track::topological_type(t);
      if (type.disc_degrees != target.disc_degrees || type.punctures != target.punctures) continue;
    } catch (const Error&) {
      continue;
    }
    if (target.orientable && !track::is_orientable(t)) continue;
    auto large = track::large_branches(t);
    if (large.empty() || static_cast<int>(large.size()) > target.max_large) continue;
    if (!cone::is_recurrent(t)) continue;
    if (target.solution_dim >= 0 &&
        static_cast<int>(cone::solution_space(t).size()) != target.solution_dim) {
      continue;
    }
    return track::canonical_form(t);
  }
  return std::nullopt;
}

}  // namespace ttlab::fixtures
