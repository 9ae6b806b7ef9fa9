// Fixture generator: randomized search for valid recurrent train tracks of a
// prescribed topological type, written to the fixtures directory. Run once;
// the committed .tt files are the frozen outputs.

#include <cstdio>
#include <string>

#include "support/fixtures.hpp"
#include "ttlab/cone.hpp"
#include "ttlab/splitgraph.hpp"

using namespace ttlab;

namespace {

// A fixture must also support the downstream pipeline: a reasonably live
// splitting graph and two positive marked loops of moderate length.
bool lively(const track::TrainTrack& t) {
  auto g = seq::build_graph(t, 4);
  int live = 0;
  for (const auto& n : g.nodes) live += n.dead ? 0 : 1;
  if (live < 8) return false;
  try {
    auto marked = seq::find_marked_sequences(t, 2, 16);
    return marked[0].seq.steps.size() <= 14;
  } catch (const Error&) {
    return false;
  }
}

int generate(const std::string& dir, const std::string& name, fixtures::SearchTarget target,
             std::uint64_t seed) {
  for (int round = 0; round < 64; ++round) {
    auto found = fixtures::search_track(target, seed + 1000 * round, 500000);
    if (!found) continue;
    const auto& t = *found;
    if (!lively(t)) continue;
    track::save_tt_file(t, dir + "/" + name);
    auto type = track::topological_type(t);
    auto rays = cone::vertex_cycles(t);
    std::printf(
        "%s: type %s switches %zu branches %zu dim %zu rays %zu large %zu orientable %d\n",
        name.c_str(), type.str().c_str(), t.switches.size(), t.branches.size(),
        cone::solution_space(t).size(), rays.size(), track::large_branches(t).size(),
        track::is_orientable(t) ? 1 : 0);
    return 0;
  }
  std::fprintf(stderr, "%s: search exhausted\n", name.c_str());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : "fixtures";
  std::uint64_t base_seed = argc > 2 ? std::stoull(argv[2]) : 7001;
  int rc = 0;

  fixtures::SearchTarget g2;
  g2.switches = 8;
  g2.disc_degrees = {2, 2};
  g2.punctures = 0;
  g2.genus = 2;
  g2.orientable = true;
  g2.max_large = 2;
  rc |= generate(dir, "genus2_type22.tt", g2, base_seed);

  fixtures::SearchTarget g1;
  g1.switches = 6;
  g1.disc_degrees = {2};
  g1.punctures = 2;
  g1.genus = 1;
  g1.orientable = false;
  g1.solution_dim = 3;
  g1.max_large = 2;
  rc |= generate(dir, "genus1_type2_m2.tt", g1, base_seed + 1);

  fixtures::SearchTarget g2b;
  g2b.switches = 6;
  g2b.disc_degrees = {4};
  g2b.punctures = 0;
  g2b.genus = 2;
  g2b.orientable = false;
  g2b.max_large = 2;
  rc |= generate(dir, "genus2_type4.tt", g2b, base_seed + 2);

  return rc;
}
