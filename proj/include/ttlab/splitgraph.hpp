#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ttlab/cone.hpp"
#include "ttlab/linalg.hpp"
#include "ttlab/track.hpp"

namespace ttlab::seq {

using ChoiceMap = std::vector<std::pair<int, track::SplitDir>>;

// Admissible full-splitting sequence with its per-step and composed
// carrying matrices. tracks[i] is the numbered track after i full splits;
// step_matrices[i] maps weights on tracks[i+1] to weights on tracks[i].
struct SplitSequence {
  std::vector<track::TrainTrack> tracks;
  std::vector<ChoiceMap> steps;
  std::vector<lin::IMat> step_matrices;
  std::vector<bool> step_recurrent;
  bool admissible = true;

  int length() const { return static_cast<int>(steps.size()); }
  const track::TrainTrack& start() const { return tracks.front(); }
  const track::TrainTrack& end() const { return tracks.back(); }
};

SplitSequence make_sequence(const track::TrainTrack& start, const std::vector<ChoiceMap>& steps);

// Composed matrix of the whole sequence; InadmissibleStep when a step left
// the recurrent range.
lin::IMat carrying_matrix(const SplitSequence& seq);

// Composed matrix of the first `len` steps.
lin::IMat prefix_matrix(const SplitSequence& seq, int len);

// Strict positivity of m on every extreme ray of the cone it is fed from.
bool positive_on_cycles(const lin::IMat& m, const std::vector<cone::WeightVector>& rays);

struct GraphNode {
  std::string bytes;  // canonical serialization
  std::uint64_t hash = 0;
  track::TrainTrack track;
  bool dead = false;  // non-recurrent outcome, kept but never expanded
  int depth = 0;
};

struct GraphEdge {
  int src = 0;
  int dst = 0;
  ChoiceMap choices;
  lin::IMat matrix;  // weights on dst -> weights on src
};

struct SplittingGraph {
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  int seed_node = 0;
  int depth = 0;

  int find_node(const std::string& bytes) const;
  std::vector<int> out_edges(int node) const;
};

// BFS over full numbered splits to the given depth; node identity is the
// canonical serialized form. Deterministic.
SplittingGraph build_graph(const track::TrainTrack& seed, int depth);

std::string graph_to_json(const SplittingGraph& g);
SplittingGraph graph_from_json(const std::string& text);
void save_graph(const SplittingGraph& g, const std::string& path);
SplittingGraph load_graph(const std::string& path);

struct ContractionStats {
  double beta_hat = 0.0;   // min over samples and branch pairs of nu(b)/nu(b')
  double delta_hat = 0.0;  // min over samples of (a0' - a0)/(1 - a0)
  int samples_used = 0;
  int excluded = 0;  // near-diagonal pairs skipped
};

// Monte Carlo check of the carrying contraction on a positive sequence.
ContractionStats contraction_stats(const SplitSequence& seq, int samples, std::uint64_t rng_seed);

// Sup-Finsler diameters of the normalized image cones of the prefix
// carrying maps, measured at the barycenter of the full normalized cone of
// the start track (fixed base point, so nesting forces monotonicity).
std::vector<double> nested_diameter(const SplitSequence& seq,
                                    const std::vector<int>& prefix_lengths);

// A length-k full-splitting word whose composed matrix is positive on the
// vertex cycles of its end track; the anchor object of the symbolic coding.
struct MarkedSequence {
  SplitSequence seq;
  std::vector<std::string> node_bytes;  // k+1 canonical forms
  lin::IMat matrix;                     // composed, positive on end cycles
};

// Finds `count` marked sequences starting at distinct graph nodes, each the
// shortest positive word from its start (searched breadth-first up to
// max_len), then extends all of them to the common length k = max over the
// found words. NoMarkedSequences when none exists within the budget.
std::vector<MarkedSequence> find_marked_sequences(const track::TrainTrack& seed, int count,
                                                  int max_len);

}  // namespace ttlab::seq
