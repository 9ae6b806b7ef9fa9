#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ttlab/linalg.hpp"
#include "ttlab/splitgraph.hpp"
#include "ttlab/track.hpp"

namespace ttlab::sym {

// Per-class linear restriction of the weight spaces. The primal span lives
// in the coordinates of the class's marked-sequence end node, the dual span
// at its start node. Empty spans mean "no restriction".
struct ClassConstraint {
  lin::QMat primal_span;
  lin::QMat dual_span;
};

struct AffineConstraint {
  std::vector<ClassConstraint> per_class;  // empty = trivial everywhere
  bool trivial() const { return per_class.empty(); }
};

// Admissible splitting word whose prefix and suffix realize marked
// sequences and whose interior avoids every marked window.
struct LetterS {
  int id = 0;
  int class_from = 0;  // prefix realizes marked[class_from]
  int class_to = 0;    // suffix realizes marked[class_to]
  std::vector<std::string> nodes;        // s+1 canonical serializations
  std::vector<std::uint64_t> node_hashes;
  std::vector<seq::ChoiceMap> steps;     // s full-split choice maps
  std::vector<lin::IMat> step_matrices;  // per-step carrying matrices
  lin::IMat full_matrix;                 // composed over the whole word
  track::TrainTrack end_track;
  bool feasible = true;      // condition (3): affine cones meet the open cones
  bool primal_nests = true;  // pushed primal span lands in the prefix class span
  bool dual_nests = true;    // transported dual span lands in the suffix class span

  int length() const { return static_cast<int>(steps.size()); }
};

struct SAlphabet {
  int k = 0;  // marked-sequence length
  std::vector<seq::MarkedSequence> marked;
  std::vector<LetterS> letters;
  AffineConstraint constraint;

  const track::TrainTrack& class_start(int i) const { return marked[i].seq.start(); }
  const track::TrainTrack& class_end(int i) const { return marked[i].seq.end(); }
  std::vector<int> letters_from(int class_i) const;
  std::vector<int> letters_to(int class_i) const;
};

struct SBuildParams {
  int classes = 2;
  int marked_max_len = 24;  // budget for the positive-word search
  int word_cap = 0;         // max letter length; 0 = 2k + 4
  int max_letters = 4000;
};

// Enumerates every admissible word up to the cap that starts with a marked
// sequence, ends with one, and contains no interior marked window; affine
// feasibility is checked per letter by exact LP.
SAlphabet build_alphabet_S(const track::TrainTrack& seed_track, const SBuildParams& params,
                           const AffineConstraint* constraint = nullptr);

// Transition: k+1-node overlap (including the split choices) plus nesting of
// the affine spans through the carrying matrices.
bool transition_allowed(const SAlphabet& a, int x, int y);

// First-return word at the base class: starts at the class, first re-entry
// at its end, carrying matrix composed up to the return position.
struct LetterA {
  int id = 0;
  std::vector<int> word;  // indices into SAlphabet::letters
  int return_length = 0;  // number of S-letters consumed
  int steps_to_return = 0;
  lin::IMat b_matrix;     // endomorphism of the base weight space
};

struct AAlphabet {
  int base_class = 0;
  int k = 0;
  track::TrainTrack tau;    // base node (marked start of the class)
  lin::IMat base_matrix;    // carrying matrix of the class's marked loop
  std::vector<LetterA> letters;
};

AAlphabet build_alphabet_A(const SAlphabet& s, int base_class, int max_return, int max_letters);

// --- roof functions ---------------------------------------------------------

// One splitting step: log of the mass growth under the carrying matrix.
double roof_rho(const lin::IMat& step_matrix, const lin::DVec& mu);

// Roof of a single S-letter with the measure given at the letter's end node:
// the mass-ratio telescope over the letter's shift span (steps 1..s-k).
double roof_phi(const SAlphabet& a, const LetterS& letter, const lin::DVec& mu_at_end);

// Roof of an infinite-word truncation: phi of word[0] with the measure
// induced by carrying mu (given at the last node of the concatenation) up
// the concatenated word.
double roof_phi_word(const SAlphabet& a, const std::vector<int>& word,
                     const lin::DVec& mu_at_final);

// Roof of an A-letter with mu given at the return node (base coordinates).
double roof_omega(const AAlphabet& a, int letter, const lin::DVec& mu_at_return);

// Concatenated step matrices of an S-word (overlaps removed).
std::vector<lin::IMat> word_step_matrices(const SAlphabet& a, const std::vector<int>& word);

// --- variation --------------------------------------------------------------

// Random corpus of admissible S-words: for every stem length in [1, depth)
// a shared stem with two distinct continuations, plus plain random words.
std::vector<std::vector<int>> variation_corpus(const SAlphabet& a, int depth, int families,
                                               std::uint64_t seed);

// var_n over the corpus: max |phi(y) - phi(z)| over pairs agreeing on the
// first n letters, for n = 1..n_max. CorpusTooSmall when some n has no pair.
std::vector<double> variation_series(const SAlphabet& a,
                                     const std::vector<std::vector<int>>& corpus, int n_max);

}  // namespace ttlab::sym
