#include "ttlab/alphabet.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ttlab/cone.hpp"
#include "ttlab/error.hpp"
#include "ttlab/kernels.hpp"
#include "ttlab/rng.hpp"

namespace ttlab::sym {

namespace {

std::string choice_key(const seq::ChoiceMap& c) {
  std::string out;
  for (const auto& [num, dir] : c) {
    out += std::to_string(num);
    out += dir == track::SplitDir::Left ? 'L' : 'R';
    out += ';';
  }
  return out;
}

// Lazily expanded splitting-node cache keyed by canonical bytes.
struct NodeCache {
  struct Expansion {
    seq::ChoiceMap choices;
    std::string target;
    lin::IMat matrix;
  };
  struct Entry {
    track::TrainTrack t;
    std::uint64_t hash = 0;
    bool recurrent = false;
    bool expanded = false;
    std::vector<Expansion> out;
  };
  std::map<std::string, Entry> entries;

  const Entry& get(const track::TrainTrack& t) {
    std::string bytes = track::canonical_bytes(t);
    auto it = entries.find(bytes);
    if (it == entries.end()) {
      Entry e;
      e.t = track::canonical_form(t);
      e.hash = track::canonical_hash(t);
      e.recurrent = cone::is_recurrent(e.t);
      it = entries.emplace(std::move(bytes), std::move(e)).first;
    }
    return it->second;
  }

  const Entry& expand(const std::string& bytes) {
    Entry& e = entries.at(bytes);
    if (e.expanded) return e;
    e.expanded = true;
    std::vector<int> large = track::large_branches(e.t);
    for (std::uint32_t mask = 0; mask < (1u << large.size()); ++mask) {
      seq::ChoiceMap c;
      for (std::size_t i = 0; i < large.size(); ++i) {
        c.push_back({large[i],
                     (mask >> i & 1) ? track::SplitDir::Left : track::SplitDir::Right});
      }
      auto res = track::full_numbered_split(e.t, c);
      const Entry& tgt = get(res.track);
      if (!tgt.recurrent) continue;
      std::string tgt_bytes = track::canonical_bytes(tgt.t);
      entries.at(bytes).out.push_back({std::move(c), std::move(tgt_bytes), res.matrix});
    }
    return entries.at(bytes);
  }
};

struct MarkedKey {
  std::vector<std::string> nodes;
  std::vector<std::string> choice_keys;
};

bool window_matches(const std::vector<std::string>& nodes,
                    const std::vector<std::string>& choices, std::size_t from,
                    const MarkedKey& mk) {
  const std::size_t k = mk.choice_keys.size();
  if (nodes.size() < from + k + 1) return false;
  for (std::size_t j = 0; j <= k; ++j) {
    if (nodes[from + j] != mk.nodes[j]) return false;
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (choices[from + j] != mk.choice_keys[j]) return false;
  }
  return true;
}

std::uint64_t fnv64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::vector<int> SAlphabet::letters_from(int class_i) const {
  std::vector<int> out;
  for (const auto& l : letters) {
    if (l.class_from == class_i) out.push_back(l.id);
  }
  return out;
}

std::vector<int> SAlphabet::letters_to(int class_i) const {
  std::vector<int> out;
  for (const auto& l : letters) {
    if (l.class_to == class_i) out.push_back(l.id);
  }
  return out;
}

SAlphabet build_alphabet_S(const track::TrainTrack& seed_track, const SBuildParams& params,
                           const AffineConstraint* constraint) {
  SAlphabet alpha;
  alpha.marked = seq::find_marked_sequences(seed_track, params.classes, params.marked_max_len);
  if (alpha.marked.empty()) fail(Err::NoMarkedSequences, "no marked sequences");
  alpha.k = alpha.marked[0].seq.length();
  if (constraint != nullptr) alpha.constraint = *constraint;
  if (!alpha.constraint.trivial() &&
      static_cast<int>(alpha.constraint.per_class.size()) != params.classes) {
    fail(Err::BranchMismatch, "constraint class count mismatch");
  }
  const int k = alpha.k;
  const int cap = params.word_cap > 0 ? params.word_cap : 2 * k + 4;
  if (cap < 2 * k) return alpha;  // condition (1) unsatisfiable below 2k

  // Per-class feasibility of condition (3): the primal span must meet the
  // open cone at the class end node, the dual span the open orthant at the
  // start node.
  const int n_classes = static_cast<int>(alpha.marked.size());
  std::vector<bool> primal_feasible(n_classes, true);
  std::vector<bool> dual_feasible(n_classes, true);
  if (!alpha.constraint.trivial()) {
    for (int m = 0; m < n_classes; ++m) {
      const auto& cc = alpha.constraint.per_class[m];
      const track::TrainTrack& end = alpha.marked[m].seq.end();
      const int p = static_cast<int>(end.branches.size());
      if (!cc.primal_span.empty()) {
        lin::QMat sys = track::switch_matrix(end);
        lin::QMat annih = lin::kernel_basis(cc.primal_span, p);
        for (auto& row : annih) sys.push_back(std::move(row));
        lin::QMat basis = lin::kernel_basis(sys, p);
        primal_feasible[m] = lin::positive_point_in_span(basis);
      }
      if (!cc.dual_span.empty()) {
        dual_feasible[m] = lin::positive_point_in_span(cc.dual_span);
      }
    }
  }

  NodeCache cache;
  std::vector<MarkedKey> keys(n_classes);
  for (int m = 0; m < n_classes; ++m) {
    keys[m].nodes = alpha.marked[m].node_bytes;
    for (const auto& c : alpha.marked[m].seq.steps) keys[m].choice_keys.push_back(choice_key(c));
    for (const auto& t : alpha.marked[m].seq.tracks) cache.get(t);
  }

  // Every letter factors as (marked prefix) . (middle path) . (marked
  // suffix); only the middle needs enumeration. Interior-window and
  // feasibility conditions are checked on the assembled word.
  struct Frame {
    std::vector<std::string> nodes;
    std::vector<std::string> choices;
    std::vector<seq::ChoiceMap> steps;
    std::vector<lin::IMat> mats;
  };

  for (int ci = 0; ci < n_classes; ++ci) {
    Frame fr;
    for (const auto& b : alpha.marked[ci].node_bytes) fr.nodes.push_back(b);
    for (std::size_t i = 0; i < alpha.marked[ci].seq.steps.size(); ++i) {
      fr.choices.push_back(keys[ci].choice_keys[i]);
      fr.steps.push_back(alpha.marked[ci].seq.steps[i]);
      fr.mats.push_back(alpha.marked[ci].seq.step_matrices[i]);
    }

    auto try_emit = [&](int match) {
      if (static_cast<int>(alpha.letters.size()) >= params.max_letters) return;
      // Assemble prefix + middle + suffix.
      Frame w = fr;
      for (std::size_t i = 0; i < keys[match].choice_keys.size(); ++i) {
        w.nodes.push_back(keys[match].nodes[i + 1]);
        w.choices.push_back(keys[match].choice_keys[i]);
        w.steps.push_back(alpha.marked[match].seq.steps[i]);
        w.mats.push_back(alpha.marked[match].seq.step_matrices[i]);
      }
      const int s = static_cast<int>(w.steps.size());
      // No marked window may start in [k, s-k).
      for (int t = k; t < s - k; ++t) {
        for (int m = 0; m < n_classes; ++m) {
          if (window_matches(w.nodes, w.choices, t, keys[m])) return;
        }
      }
      LetterS letter;
      letter.class_from = ci;
      letter.class_to = match;
      letter.nodes = w.nodes;
      for (const auto& b : w.nodes) letter.node_hashes.push_back(fnv64(b));
      letter.steps = w.steps;
      letter.step_matrices = w.mats;
      const int p = static_cast<int>(alpha.marked[ci].seq.start().branches.size());
      lin::IMat full = lin::IMat::identity(p);
      for (const auto& m : w.mats) full = full * m;
      letter.full_matrix = std::move(full);
      letter.end_track = alpha.marked[match].seq.end();
      letter.feasible = primal_feasible[match] && dual_feasible[ci];

      if (!alpha.constraint.trivial()) {
        // Nesting of the spans through the carrying matrices.
        const auto& w_to = alpha.constraint.per_class[match].primal_span;
        const auto& w_from = alpha.constraint.per_class[ci].primal_span;
        if (!w_to.empty() && !w_from.empty()) {
          lin::IMat post = lin::IMat::identity(p);
          for (int i = k; i < s; ++i) post = post * w.mats[i];
          lin::QMat pushed;
          for (const auto& row : w_to) pushed.push_back(post.apply(row));
          // Target: the prefix-class span expressed at node k of this word,
          // which is the marked end node of class ci.
          letter.primal_nests = lin::span_subset(pushed, w_from);
        }
        const auto& d_from = alpha.constraint.per_class[ci].dual_span;
        const auto& d_to = alpha.constraint.per_class[match].dual_span;
        if (!d_from.empty() && !d_to.empty()) {
          lin::IMat pre = lin::IMat::identity(p);
          for (int i = 0; i < s - k; ++i) pre = pre * w.mats[i];
          lin::QMat pulled;
          for (const auto& row : d_from) pulled.push_back(pre.apply_transpose(row));
          letter.dual_nests = lin::span_subset(pulled, d_to);
        }
      }
      if (letter.feasible) alpha.letters.push_back(std::move(letter));
    };

    // Middle-path DFS with undo, budget cap - 2k.
    const int budget = cap - 2 * k;
    auto dfs = [&](auto&& self, int depth) -> void {
      for (int m = 0; m < n_classes; ++m) {
        if (fr.nodes.back() == keys[m].nodes[0]) try_emit(m);
      }
      if (depth >= budget || static_cast<int>(alpha.letters.size()) >= params.max_letters) {
        return;
      }
      cache.expand(fr.nodes.back());
      const auto out = cache.entries.at(fr.nodes.back()).out;  // copy: cache may grow
      for (const auto& exp : out) {
        fr.nodes.push_back(exp.target);
        fr.choices.push_back(choice_key(exp.choices));
        fr.steps.push_back(exp.choices);
        fr.mats.push_back(exp.matrix);
        self(self, depth + 1);
        fr.nodes.pop_back();
        fr.choices.pop_back();
        fr.steps.pop_back();
        fr.mats.pop_back();
      }
    };
    dfs(dfs, 0);
  }
  auto word_key = [](const LetterS& l) {
    std::string out;
    for (const auto& c : l.steps) out += choice_key(c) + "|";
    return out;
  };
  std::stable_sort(alpha.letters.begin(), alpha.letters.end(),
                   [&](const LetterS& a, const LetterS& b) {
                     if (a.length() != b.length()) return a.length() < b.length();
                     if (a.class_from != b.class_from) return a.class_from < b.class_from;
                     if (a.class_to != b.class_to) return a.class_to < b.class_to;
                     if (a.nodes != b.nodes) return a.nodes < b.nodes;
                     return word_key(a) < word_key(b);
                   });
  for (std::size_t i = 0; i < alpha.letters.size(); ++i) {
    alpha.letters[i].id = static_cast<int>(i);
  }
  return alpha;
}

bool transition_allowed(const SAlphabet& a, int x, int y) {
  const LetterS& lx = a.letters[x];
  const LetterS& ly = a.letters[y];
  if (lx.class_to != ly.class_from) return false;
  const int k = a.k;
  const int s = lx.length();
  // Window overlap: y's first k steps and k+1 nodes coincide with x's tail.
  for (int j = 0; j <= k; ++j) {
    if (lx.nodes[s - k + j] != ly.nodes[j]) return false;
  }
  for (int j = 0; j < k; ++j) {
    if (choice_key(lx.steps[s - k + j]) != choice_key(ly.steps[j])) return false;
  }
  return lx.dual_nests && ly.primal_nests;
}

AAlphabet build_alphabet_A(const SAlphabet& s, int base_class, int max_return, int max_letters) {
  if (base_class < 0 || base_class >= static_cast<int>(s.marked.size())) {
    fail(Err::EmptyClass, "no such class: " + std::to_string(base_class));
  }
  AAlphabet out;
  out.base_class = base_class;
  out.k = s.k;
  out.tau = s.class_start(base_class);
  out.base_matrix = s.marked[base_class].matrix;

  std::vector<int> first = s.letters_from(base_class);
  bool any_last = false;
  for (const auto& l : s.letters) any_last = any_last || l.class_to == base_class;
  if (first.empty() || !any_last) {
    fail(Err::EmptyClass, "no letter starts or none ends at the base class");
  }

  const int p = static_cast<int>(out.tau.branches.size());
  const int n = static_cast<int>(s.letters.size());
  std::vector<std::vector<int>> succ(n);
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (transition_allowed(s, x, y)) succ[x].push_back(y);
    }
  }
  // DFS over admissible words, first return at the base class.
  struct Item {
    std::vector<int> word;
  };
  std::vector<Item> stack;
  for (auto it = first.rbegin(); it != first.rend(); ++it) stack.push_back({{*it}});
  while (!stack.empty() && static_cast<int>(out.letters.size()) < max_letters) {
    Item item = std::move(stack.back());
    stack.pop_back();
    int last = item.word.back();
    if (s.letters[last].class_to == base_class) {
      // First return: emit and stop this branch.
      LetterA a;
      a.id = static_cast<int>(out.letters.size());
      a.word = item.word;
      a.return_length = static_cast<int>(item.word.size());
      std::vector<lin::IMat> steps = word_step_matrices(s, item.word);
      a.steps_to_return = static_cast<int>(steps.size()) - s.k;
      lin::IMat b = lin::IMat::identity(p);
      for (int i = 0; i < a.steps_to_return; ++i) b = b * steps[i];
      a.b_matrix = std::move(b);
      out.letters.push_back(std::move(a));
      continue;
    }
    if (static_cast<int>(item.word.size()) >= max_return) continue;
    for (auto it = succ[last].rbegin(); it != succ[last].rend(); ++it) {
      Item ext = item;
      ext.word.push_back(*it);
      stack.push_back(std::move(ext));
    }
  }
  if (out.letters.empty()) fail(Err::EmptyClass, "no first-return word within the cap");
  std::stable_sort(out.letters.begin(), out.letters.end(),
                   [](const LetterA& a, const LetterA& b) {
                     if (a.return_length != b.return_length) {
                       return a.return_length < b.return_length;
                     }
                     return a.word < b.word;
                   });
  for (std::size_t i = 0; i < out.letters.size(); ++i) {
    out.letters[i].id = static_cast<int>(i);
  }
  return out;
}

std::vector<lin::IMat> word_step_matrices(const SAlphabet& a, const std::vector<int>& word) {
  std::vector<lin::IMat> out;
  for (std::size_t w = 0; w < word.size(); ++w) {
    const LetterS& l = a.letters[word[w]];
    std::size_t from = w == 0 ? 0 : static_cast<std::size_t>(a.k);
    for (std::size_t i = from; i < l.step_matrices.size(); ++i) {
      out.push_back(l.step_matrices[i]);
    }
  }
  return out;
}

double roof_rho(const lin::IMat& step_matrix, const lin::DVec& mu) {
  double before = simd::sum(mu.data(), mu.size());
  if (!(before > 0.0)) fail(Err::ZeroMass, "measure has no mass");
  lin::DVec up = step_matrix.apply(mu);
  double after = simd::sum(up.data(), up.size());
  return std::log(after / before);
}

namespace {

// Masses of mu carried up the steps; totals[i] = total mass at position i
// when mu lives at position steps.size().
std::vector<double> carried_totals(const std::vector<lin::IMat>& steps, const lin::DVec& mu) {
  std::vector<double> totals(steps.size() + 1, 0.0);
  lin::DVec cur = mu;
  totals[steps.size()] = simd::sum(cur.data(), cur.size());
  for (int i = static_cast<int>(steps.size()) - 1; i >= 0; --i) {
    cur = steps[i].apply(cur);
    totals[i] = simd::sum(cur.data(), cur.size());
  }
  return totals;
}

}  // namespace

double roof_phi(const SAlphabet& a, const LetterS& letter, const lin::DVec& mu_at_end) {
  if (!(simd::sum(mu_at_end.data(), mu_at_end.size()) > 0.0)) {
    fail(Err::ZeroMass, "measure has no mass");
  }
  auto totals = carried_totals(letter.step_matrices, mu_at_end);
  const int shift_span = letter.length() - a.k;
  return std::log(totals[0] / totals[shift_span]);
}

double roof_phi_word(const SAlphabet& a, const std::vector<int>& word,
                     const lin::DVec& mu_at_final) {
  if (word.empty()) fail(Err::CorpusTooSmall, "empty word");
  auto steps = word_step_matrices(a, word);
  auto totals = carried_totals(steps, mu_at_final);
  const int shift_span = a.letters[word[0]].length() - a.k;
  return std::log(totals[0] / totals[shift_span]);
}

double roof_omega(const AAlphabet& a, int letter, const lin::DVec& mu_at_return) {
  double before = simd::sum(mu_at_return.data(), mu_at_return.size());
  if (!(before > 0.0)) fail(Err::ZeroMass, "measure has no mass");
  lin::DVec img = a.letters[letter].b_matrix.apply(mu_at_return);
  return std::log(simd::sum(img.data(), img.size()) / before);
}

std::vector<std::vector<int>> variation_corpus(const SAlphabet& a, int depth, int families,
                                               std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<int>> corpus;
  // Transition table once.
  const int n = static_cast<int>(a.letters.size());
  std::vector<std::vector<int>> next(n);
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (transition_allowed(a, x, y)) next[x].push_back(y);
    }
  }
  auto random_walk = [&](std::vector<int> word, int target_len) {
    while (static_cast<int>(word.size()) < target_len) {
      const auto& succ = next[word.back()];
      if (succ.empty()) break;
      word.push_back(succ[rng.below(succ.size())]);
    }
    return word;
  };
  for (int f = 0; f < families; ++f) {
    for (int stem_len = 1; stem_len < depth; ++stem_len) {
      std::vector<int> stem{static_cast<int>(rng.below(n))};
      stem = random_walk(std::move(stem), stem_len);
      if (static_cast<int>(stem.size()) < stem_len) continue;
      const auto& succ = next[stem.back()];
      if (succ.empty()) continue;
      // Two continuations diverging right after the stem when possible.
      int c1 = succ[rng.below(succ.size())];
      int c2 = succ.size() > 1 ? succ[(std::find(succ.begin(), succ.end(), c1) - succ.begin() + 1 +
                                       rng.below(succ.size() - 1)) %
                                      succ.size()]
                               : c1;
      auto w1 = stem;
      w1.push_back(c1);
      auto w2 = stem;
      w2.push_back(c2);
      corpus.push_back(random_walk(std::move(w1), depth));
      corpus.push_back(random_walk(std::move(w2), depth));
    }
  }
  return corpus;
}

std::vector<double> variation_series(const SAlphabet& a,
                                     const std::vector<std::vector<int>>& corpus, int n_max) {
  if (corpus.size() < 2) fail(Err::CorpusTooSmall, "need at least two words");
  // phi per word with the canonical base measure at its end.
  std::vector<double> phis(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& word = corpus[i];
    const LetterS& last = a.letters[word.back()];
    auto rays = cone::vertex_cycles(last.end_track);
    lin::DVec mu(last.end_track.branches.size(), 0.0);
    for (const auto& r : rays) {
      lin::DVec d = lin::to_double(r.values);
      simd::axpy(1.0, d.data(), mu.data(), mu.size());
    }
    phis[i] = roof_phi_word(a, word, mu);
  }
  std::vector<double> var(n_max + 1, 0.0);
  std::vector<bool> seen(n_max + 1, false);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (std::size_t j = i + 1; j < corpus.size(); ++j) {
      std::size_t cp = 0;
      while (cp < corpus[i].size() && cp < corpus[j].size() && corpus[i][cp] == corpus[j][cp]) {
        ++cp;
      }
      if (cp == 0) continue;
      double d = std::fabs(phis[i] - phis[j]);
      for (int n = 1; n <= std::min<int>(n_max, static_cast<int>(cp)); ++n) {
        var[n] = std::max(var[n], d);
        seen[n] = true;
      }
    }
  }
  std::vector<double> out;
  for (int n = 1; n <= n_max; ++n) {
    if (!seen[n]) fail(Err::CorpusTooSmall, "no pair agrees on " + std::to_string(n) + " letters");
    out.push_back(var[n]);
  }
  return out;
}

}  // namespace ttlab::sym
