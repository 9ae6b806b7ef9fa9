#include "ttlab/splitgraph.hpp"

#include <algorithm>
#include <deque>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "ttlab/error.hpp"
#include "ttlab/kernels.hpp"
#include "ttlab/rng.hpp"

namespace ttlab::seq {

SplitSequence make_sequence(const track::TrainTrack& start, const std::vector<ChoiceMap>& steps) {
  SplitSequence seq;
  seq.tracks.push_back(track::canonical_form(start));
  for (const auto& step : steps) {
    auto res = track::full_numbered_split(seq.tracks.back(), step);
    track::TrainTrack next = track::canonical_form(res.track);
    bool rec = cone::is_recurrent(next);
    seq.steps.push_back(step);
    seq.step_matrices.push_back(res.matrix);
    seq.step_recurrent.push_back(rec);
    seq.admissible = seq.admissible && rec;
    seq.tracks.push_back(std::move(next));
  }
  return seq;
}

lin::IMat prefix_matrix(const SplitSequence& seq, int len) {
  const int p = static_cast<int>(seq.start().branches.size());
  lin::IMat m = lin::IMat::identity(p);
  for (int i = 0; i < len; ++i) m = m * seq.step_matrices[i];
  return m;
}

lin::IMat carrying_matrix(const SplitSequence& seq) {
  for (std::size_t i = 0; i < seq.step_recurrent.size(); ++i) {
    if (!seq.step_recurrent[i]) {
      fail(Err::InadmissibleStep, "step " + std::to_string(i) + " leaves the recurrent range");
    }
  }
  return prefix_matrix(seq, seq.length());
}

bool positive_on_cycles(const lin::IMat& m, const std::vector<cone::WeightVector>& rays) {
  if (rays.empty()) return false;
  for (const auto& ray : rays) {
    lin::QVec img = m.apply(ray.values);
    for (const auto& e : img) {
      if (!(e > Rational(0))) return false;
    }
  }
  return true;
}

int SplittingGraph::find_node(const std::string& bytes) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].bytes == bytes) return static_cast<int>(i);
  }
  return -1;
}

std::vector<int> SplittingGraph::out_edges(int node) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].src == node) out.push_back(static_cast<int>(i));
  }
  return out;
}

namespace {

// Deterministic enumeration of the 2^L full-split choice maps: bit i of the
// mask picks the direction at the i-th large branch in ascending order.
ChoiceMap choices_from_mask(const std::vector<int>& large, std::uint32_t mask) {
  ChoiceMap out;
  for (std::size_t i = 0; i < large.size(); ++i) {
    out.push_back({large[i],
                   (mask >> i & 1) ? track::SplitDir::Left : track::SplitDir::Right});
  }
  return out;
}

}  // namespace

SplittingGraph build_graph(const track::TrainTrack& seed, int depth) {
  if (depth < 0) fail(Err::DepthZero, "depth must be nonnegative");
  track::require_valid(seed);
  SplittingGraph g;
  g.depth = depth;
  std::map<std::string, int> index;

  auto add_node = [&](track::TrainTrack t, int d) -> std::pair<int, bool> {
    std::string bytes = track::canonical_bytes(t);
    auto it = index.find(bytes);
    if (it != index.end()) return {it->second, false};
    GraphNode node;
    node.hash = track::canonical_hash(t);
    node.track = track::canonical_form(t);
    node.bytes = std::move(bytes);
    node.dead = !cone::is_recurrent(node.track);
    node.depth = d;
    int id = static_cast<int>(g.nodes.size());
    g.nodes.push_back(std::move(node));
    index[g.nodes[id].bytes] = id;
    return {id, true};
  };

  g.seed_node = add_node(seed, 0).first;
  std::deque<int> frontier{g.seed_node};
  while (!frontier.empty()) {
    int id = frontier.front();
    frontier.pop_front();
    if (g.nodes[id].dead || g.nodes[id].depth >= depth) continue;
    const track::TrainTrack cur = g.nodes[id].track;  // copy: g.nodes may reallocate
    std::vector<int> large = track::large_branches(cur);
    if (large.empty()) continue;
    for (std::uint32_t mask = 0; mask < (1u << large.size()); ++mask) {
      ChoiceMap choices = choices_from_mask(large, mask);
      auto res = track::full_numbered_split(cur, choices);
      auto [dst, fresh] = add_node(res.track, g.nodes[id].depth + 1);
      g.edges.push_back(GraphEdge{id, dst, choices, res.matrix});
      if (fresh && !g.nodes[dst].dead && g.nodes[dst].depth < depth) frontier.push_back(dst);
    }
  }
  return g;
}

std::string graph_to_json(const SplittingGraph& g) {
  nlohmann::ordered_json j;
  j["depth"] = g.depth;
  j["seed_node"] = g.seed_node;
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : g.nodes) {
    nlohmann::ordered_json jn;
    jn["hash"] = n.hash;
    jn["dead"] = n.dead;
    jn["depth"] = n.depth;
    jn["track"] = nlohmann::ordered_json::parse(n.bytes);
    j["nodes"].push_back(std::move(jn));
  }
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : g.edges) {
    nlohmann::ordered_json je;
    je["src"] = e.src;
    je["dst"] = e.dst;
    je["choices"] = nlohmann::ordered_json::array();
    for (const auto& [number, dir] : e.choices) {
      je["choices"].push_back({number, dir == track::SplitDir::Left ? "L" : "R"});
    }
    je["matrix"] = e.matrix.a;
    je["dim"] = e.matrix.n;
    j["edges"].push_back(std::move(je));
  }
  return j.dump();
}

SplittingGraph graph_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& ex) {
    fail(Err::IoError, std::string("graph parse error: ") + ex.what());
  }
  SplittingGraph g;
  try {
    g.depth = j.at("depth").get<int>();
    g.seed_node = j.at("seed_node").get<int>();
    for (const auto& jn : j.at("nodes")) {
      GraphNode n;
      n.hash = jn.at("hash").get<std::uint64_t>();
      n.dead = jn.at("dead").get<bool>();
      n.depth = jn.at("depth").get<int>();
      n.track = track::from_tt_string(jn.at("track").dump());
      n.bytes = track::canonical_bytes(n.track);
      g.nodes.push_back(std::move(n));
    }
    for (const auto& je : j.at("edges")) {
      GraphEdge e;
      e.src = je.at("src").get<int>();
      e.dst = je.at("dst").get<int>();
      for (const auto& c : je.at("choices")) {
        e.choices.push_back({c[0].get<int>(), c[1].get<std::string>() == "L"
                                                  ? track::SplitDir::Left
                                                  : track::SplitDir::Right});
      }
      e.matrix.n = je.at("dim").get<int>();
      e.matrix.a = je.at("matrix").get<std::vector<std::int64_t>>();
      g.edges.push_back(std::move(e));
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& ex) {
    fail(Err::IoError, std::string("graph schema error: ") + ex.what());
  }
  return g;
}

void save_graph(const SplittingGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Err::IoError, "cannot write " + path);
  out << graph_to_json(g) << "\n";
}

SplittingGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::IoError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return graph_from_json(ss.str());
}

namespace {

// Positive unit-mass sample: Dirichlet-style mixture of the extreme rays
// with exponential weights, floored away from the boundary.
lin::DVec positive_sample(Rng& rng, const std::vector<lin::DVec>& rays, int dim) {
  lin::DVec out(dim, 0.0);
  for (const auto& ray : rays) {
    double w = rng.exponential();
    simd::axpy(w, ray.data(), out.data(), out.size());
  }
  double total = simd::sum(out.data(), out.size());
  simd::scale(1.0 / total, out.data(), out.size());
  return out;
}

}  // namespace

ContractionStats contraction_stats(const SplitSequence& seq, int samples,
                                   std::uint64_t rng_seed) {
  auto rays_q = cone::vertex_cycles(seq.end());
  lin::IMat m = carrying_matrix(seq);
  if (!positive_on_cycles(m, rays_q)) {
    fail(Err::NotPositive, "composed matrix is not positive on the end vertex cycles");
  }
  const int p = static_cast<int>(seq.start().branches.size());
  std::vector<lin::DVec> rays;
  for (const auto& r : rays_q) rays.push_back(lin::to_double(r.values));
  std::vector<double> md = m.to_double();

  Rng rng(rng_seed);
  ContractionStats stats;
  stats.beta_hat = 1e300;
  stats.delta_hat = 1e300;
  const double eps_pair = 1e-12;

  // Deterministic near-extreme pairs first: each pair of rays pulled
  // slightly into the interior, so the minimum statistics are anchored at
  // the boundary rather than left to sampling luck.
  std::vector<std::pair<lin::DVec, lin::DVec>> pairs;
  const double mix = 1e-6;
  lin::DVec bary(p, 0.0);
  for (const auto& r : rays) simd::axpy(1.0, r.data(), bary.data(), bary.size());
  simd::scale(1.0 / simd::sum(bary.data(), bary.size()), bary.data(), bary.size());
  for (std::size_t i = 0; i < rays.size(); ++i) {
    for (std::size_t j = i + 1; j < rays.size(); ++j) {
      lin::DVec a = rays[i], b = rays[j];
      a = cone::normalize_mass(a);
      b = cone::normalize_mass(b);
      for (int k = 0; k < p; ++k) {
        a[k] = (1.0 - mix) * a[k] + mix * bary[k];
        b[k] = (1.0 - mix) * b[k] + mix * bary[k];
      }
      pairs.push_back({std::move(a), std::move(b)});
    }
  }
  while (static_cast<int>(pairs.size()) < samples) {
    pairs.push_back({positive_sample(rng, rays, p), positive_sample(rng, rays, p)});
  }

  lin::DVec img(p);
  for (const auto& [mu, nu] : pairs) {
    simd::matvec(md.data(), p, p, nu.data(), img.data());
    lin::DVec nu0 = cone::normalize_mass(img);
    double lo = 1e300, hi = 0.0;
    for (double e : nu0) {
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    stats.beta_hat = std::min(stats.beta_hat, lo / hi);

    double a0 = cone::min_ratio(mu, nu);
    if (1.0 - a0 < eps_pair) {
      ++stats.excluded;
      continue;
    }
    simd::matvec(md.data(), p, p, mu.data(), img.data());
    lin::DVec mu0 = cone::normalize_mass(img);
    simd::matvec(md.data(), p, p, nu.data(), img.data());
    lin::DVec nu0b = cone::normalize_mass(img);
    double a0p = cone::min_ratio(mu0, nu0b);
    stats.delta_hat = std::min(stats.delta_hat, (a0p - a0) / (1.0 - a0));
    ++stats.samples_used;
  }
  return stats;
}

std::vector<double> nested_diameter(const SplitSequence& seq,
                                    const std::vector<int>& prefix_lengths) {
  const int p = static_cast<int>(seq.start().branches.size());
  // Fixed base point: barycenter of the start track's normalized cone.
  auto rays0 = cone::vertex_cycles(seq.start());
  lin::DVec base(p, 0.0);
  for (const auto& r : rays0) {
    lin::DVec d = cone::normalize_mass(lin::to_double(r.values));
    simd::axpy(1.0 / rays0.size(), d.data(), base.data(), base.size());
  }

  std::vector<double> out;
  for (int len : prefix_lengths) {
    lin::IMat m = prefix_matrix(seq, len);
    auto rays = cone::vertex_cycles(seq.tracks[len]);
    std::vector<lin::DVec> imgs;
    for (const auto& r : rays) {
      imgs.push_back(cone::normalize_mass(m.apply(lin::to_double(r.values))));
    }
    double diam = 0.0;
    for (std::size_t i = 0; i < imgs.size(); ++i) {
      for (std::size_t j = i + 1; j < imgs.size(); ++j) {
        lin::DVec diff(p);
        for (int k = 0; k < p; ++k) diff[k] = imgs[i][k] - imgs[j][k];
        diam = std::max(diam, cone::finsler_norm(diff, base));
      }
    }
    out.push_back(diam);
  }
  return out;
}

// Lazily expanded node table for loop searches, keyed by canonical bytes.
namespace {

struct LoopCache {
  struct Exp {
    ChoiceMap choices;
    int target = 0;
    lin::IMat matrix;
  };
  struct Node {
    track::TrainTrack t;
    std::string bytes;
    bool expanded = false;
    std::vector<Exp> out;
    bool have_rays = false;
    std::vector<cone::WeightVector> rays;
  };
  std::vector<Node> nodes;
  std::map<std::string, int> index;

  const std::vector<cone::WeightVector>& rays_of(int id) {
    if (!nodes[id].have_rays) {
      nodes[id].rays = cone::vertex_cycles(nodes[id].t);
      nodes[id].have_rays = true;
    }
    return nodes[id].rays;
  }

  int get(const track::TrainTrack& t) {
    std::string bytes = track::canonical_bytes(t);
    auto it = index.find(bytes);
    if (it != index.end()) return it->second;
    Node n;
    n.t = track::canonical_form(t);
    n.bytes = bytes;
    int id = static_cast<int>(nodes.size());
    nodes.push_back(std::move(n));
    index[bytes] = id;
    return id;
  }

  void expand(int id) {
    if (nodes[id].expanded) return;
    nodes[id].expanded = true;
    const track::TrainTrack t = nodes[id].t;
    std::vector<int> large = track::large_branches(t);
    std::vector<Exp> out;
    for (std::uint32_t mask = 0; mask < (1u << large.size()); ++mask) {
      ChoiceMap c = choices_from_mask(large, mask);
      auto res = track::full_numbered_split(t, c);
      track::TrainTrack next = track::canonical_form(res.track);
      if (!cone::is_recurrent(next)) continue;
      out.push_back({std::move(c), get(next), res.matrix});
    }
    nodes[id].out = std::move(out);
  }
};

}  // namespace

std::vector<MarkedSequence> find_marked_sequences(const track::TrainTrack& seed, int count,
                                                  int max_len) {
  track::require_valid(seed);
  LoopCache cache;
  int seed_id = cache.get(seed);
  if (!cone::is_recurrent(cache.nodes[seed_id].t)) {
    fail(Err::NoMarkedSequences, "seed track is not recurrent");
  }

  // Breadth-first discovery, collecting ancestor back-edges (cycles) along
  // the way, up to a node budget.
  const int node_budget = 6000;
  struct Cycle {
    int base;
    std::vector<ChoiceMap> word;
  };
  std::vector<Cycle> cycles;
  {
    std::map<int, int> tree_parent{{seed_id, -1}};
    std::map<int, ChoiceMap> tree_choice;
    std::map<int, int> depth{{seed_id, 0}};
    std::deque<int> queue{seed_id};
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      if (depth[u] >= max_len) continue;
      if (static_cast<int>(cache.nodes.size()) > node_budget && !cycles.empty()) break;
      cache.expand(u);
      for (const auto& e : cache.nodes[u].out) {
        int v = e.target;
        if (!depth.count(v)) {
          depth[v] = depth[u] + 1;
          tree_parent[v] = u;
          tree_choice[v] = e.choices;
          queue.push_back(v);
          continue;
        }
        bool ancestor = false;
        for (int a = u; a >= 0; a = tree_parent[a]) {
          if (a == v) {
            ancestor = true;
            break;
          }
        }
        if (!ancestor || cycles.size() >= 64) continue;
        std::vector<ChoiceMap> path;
        for (int a = u; a != v; a = tree_parent[a]) path.push_back(tree_choice[a]);
        std::reverse(path.begin(), path.end());
        path.push_back(e.choices);
        cycles.push_back({v, std::move(path)});
      }
    }
  }
  if (cycles.empty()) fail(Err::NoMarkedSequences, "no recurrent cycle within the budget");
  if (getenv("TTLAB_TRACE")) fprintf(stderr, "[marked] cycles=%zu nodes=%zu\n", cycles.size(), cache.nodes.size());

  // Marked loops must avoid their base node strictly inside, so marked
  // windows can never overlap in any admissible word; that keeps letter
  // decompositions unique and cells disjoint. Cycle targets are candidate
  // bases, tried in discovery order.
  std::vector<int> bases;
  for (const auto& c : cycles) {
    if (std::find(bases.begin(), bases.end(), c.base) == bases.end()) bases.push_back(c.base);
    if (bases.size() >= 8) break;
  }

  std::map<int, std::vector<int>> preds;
  for (std::size_t id = 0; id < cache.nodes.size(); ++id) {
    if (!cache.nodes[id].expanded) continue;
    for (const auto& e : cache.nodes[id].out) preds[e.target].push_back(static_cast<int>(id));
  }

  int base = -1;
  std::vector<std::vector<ChoiceMap>> loops;
  for (int cand : bases) {
    std::map<int, int> dist_back{{cand, 0}};
    {
      std::deque<int> q{cand};
      while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (int s : preds[u]) {
          if (!dist_back.count(s)) {
            dist_back[s] = dist_back[u] + 1;
            q.push_back(s);
          }
        }
      }
    }
    auto cand_rays = cone::vertex_cycles(cache.nodes[cand].t);
    const int p_dim = static_cast<int>(cache.nodes[cand].t.branches.size());
    for (int k = 2; k <= max_len; ++k) {
      loops.clear();
      std::vector<ChoiceMap> word;
      long long budget = 2000000;
      auto dfs = [&](auto&& self, int node, const lin::IMat& m, int len) -> void {
        if (static_cast<int>(loops.size()) >= count || budget <= 0) return;
        --budget;
        if (len == k) {
          if (node == cand && positive_on_cycles(m, cand_rays)) loops.push_back(word);
          return;
        }
        if (len > 0 && node == cand) return;  // interior visits barred
        auto it = dist_back.find(node);
        if (it == dist_back.end() || len + it->second > k) return;
        if (!cache.nodes[node].expanded) return;  // stay inside the discovered set
        const auto& out_edges = cache.nodes[node].out;
        for (const auto& e : out_edges) {
          word.push_back(e.choices);
          self(self, e.target, m * e.matrix, len + 1);
          word.pop_back();
          if (static_cast<int>(loops.size()) >= count) return;
        }
      };
      dfs(dfs, cand, lin::IMat::identity(p_dim), 0);
      if (getenv("TTLAB_TRACE")) {
        fprintf(stderr, "[marked] base=%d k=%d loops=%zu budget_left=%lld\n", cand, k,
                loops.size(), budget);
      }
      if (static_cast<int>(loops.size()) >= count) break;
    }
    if (static_cast<int>(loops.size()) >= count) {
      base = cand;
      break;
    }
  }
  if (base < 0) {
    fail(Err::NoMarkedSequences, "not enough positive base-avoiding loops within the budget");
  }
  const track::TrainTrack tau = cache.nodes[base].t;

  std::vector<MarkedSequence> out;
  for (const auto& w : loops) {
    SplitSequence s = make_sequence(tau, w);
    MarkedSequence ms;
    ms.matrix = carrying_matrix(s);
    for (const auto& t : s.tracks) ms.node_bytes.push_back(track::canonical_bytes(t));
    ms.seq = std::move(s);
    if (ms.node_bytes.front() != ms.node_bytes.back()) {
      fail(Err::NoMarkedSequences, "loop does not close");
    }
    out.push_back(std::move(ms));
  }
  return out;
}

}  // namespace ttlab::seq
