// Command-line surface of the train-track splitting laboratory.
//
// Subcommands: track, graph, alphabet, roof, pressure, mix. Outputs are
// deterministic given the configuration; every report embeds the config
// hash and the input file hashes.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ttlab/alphabet.hpp"
#include "ttlab/cells.hpp"
#include "ttlab/config.hpp"
#include "ttlab/cone.hpp"
#include "ttlab/error.hpp"
#include "ttlab/pf.hpp"
#include "ttlab/pressure.hpp"
#include "ttlab/splitgraph.hpp"
#include "ttlab/suspension.hpp"
#include "ttlab/track.hpp"

using namespace ttlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitInvariant = 2;

struct Context {
  cfg::Config config;
  std::string out_path;  // empty = stdout
};

void emit(const Context& ctx, nlohmann::ordered_json j) {
  j["config_hash"] = ctx.config.hash();
  std::string text = j.dump(2) + "\n";
  if (ctx.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(ctx.out_path);
    if (!out) fail(Err::IoError, "cannot write " + ctx.out_path);
    out << text;
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(Err::IoError, "cannot write " + path);
  out << text;
}

struct AlphabetBundle {
  sym::SAlphabet s;
  sym::AAlphabet a;
  pf::LetterSpectra spectra;
};

AlphabetBundle build_bundle(const Context& ctx, const std::string& track_file) {
  auto t = track::load_tt_file(track_file);
  sym::SBuildParams params;
  params.classes = ctx.config.classes;
  params.marked_max_len = ctx.config.marked_max_len;
  params.word_cap = ctx.config.word_cap;
  params.max_letters = ctx.config.max_letters_s;
  AlphabetBundle bundle{sym::build_alphabet_S(t, params), {}, {}};
  bundle.a = sym::build_alphabet_A(bundle.s, 0, ctx.config.max_return, ctx.config.max_letters_a);
  bundle.spectra = pf::letter_spectra(bundle.a);
  return bundle;
}

int cmd_track(const Context& ctx, const std::string& action, const std::string& file,
              int branch, const std::string& dir) {
  auto t = track::load_tt_file(file);
  nlohmann::ordered_json j;
  j["input"] = file;
  j["input_hash"] = cfg::file_hash(file);
  if (action == "validate") {
    auto rep = track::validate(t);
    j["ok"] = rep.ok;
    j["euler_characteristic"] = rep.euler_char;
    j["faces"] = nlohmann::ordered_json::array();
    for (const auto& f : rep.faces) {
      j["faces"].push_back({{"cusps", f.cusps}, {"punctured", f.punctured}});
    }
    j["issues"] = nlohmann::ordered_json::array();
    for (const auto& issue : rep.issues) {
      j["issues"].push_back({{"code", err_name(issue.code)}, {"detail", issue.detail}});
    }
    emit(ctx, j);
    return rep.ok ? kExitOk : kExitInvariant;
  }
  if (action == "type") {
    auto type = track::topological_type(t);
    j["disc_degrees"] = type.disc_degrees;
    j["punctures"] = type.punctures;
    j["type"] = type.str();
    j["orientable"] = track::is_orientable(t);
    j["large_branches"] = track::large_branches(t);
    j["solution_dim"] = cone::solution_space(t).size();
    emit(ctx, j);
    return kExitOk;
  }
  if (action == "split") {
    auto res = track::split(
        t, {branch, dir == "left" ? track::SplitDir::Left : track::SplitDir::Right});
    j["branch"] = branch;
    j["dir"] = dir;
    j["recurrent"] = cone::is_recurrent(res.track);
    j["matrix"] = res.matrix.a;
    j["track"] = nlohmann::ordered_json::parse(track::to_tt_string(res.track));
    emit(ctx, j);
    return kExitOk;
  }
  fail(Err::IoError, "unknown track action: " + action);
}

int cmd_graph(const Context& ctx, const std::string& file, int depth) {
  std::string cache_dir = ctx.config.resolved_cache_dir();
  std::filesystem::create_directories(cache_dir);
  std::uint64_t key = cfg::fnv1a(std::to_string(cfg::file_hash(file)) + "|" +
                                 std::to_string(depth) + "|" +
                                 std::to_string(ctx.config.hash()));
  std::string cache_file = cache_dir + "/graph-" + std::to_string(key) + ".json";

  seq::SplittingGraph g;
  bool cache_hit = std::filesystem::exists(cache_file);
  if (cache_hit) {
    g = seq::load_graph(cache_file);
  } else {
    g = seq::build_graph(track::load_tt_file(file), depth);
    seq::save_graph(g, cache_file);
  }
  int dead = 0;
  for (const auto& n : g.nodes) dead += n.dead ? 1 : 0;
  nlohmann::ordered_json j;
  j["input"] = file;
  j["input_hash"] = cfg::file_hash(file);
  j["depth"] = depth;
  j["nodes"] = g.nodes.size();
  j["dead_nodes"] = dead;
  j["edges"] = g.edges.size();
  j["cache"] = cache_file;
  j["cache_hit"] = cache_hit;
  emit(ctx, j);
  return kExitOk;
}

int cmd_alphabet(const Context& ctx, const std::string& file) {
  auto bundle = build_bundle(ctx, file);
  nlohmann::ordered_json j;
  j["input"] = file;
  j["input_hash"] = cfg::file_hash(file);
  j["k"] = bundle.s.k;
  j["classes"] = ctx.config.classes;
  j["s_letters"] = bundle.s.letters.size();
  j["a_letters"] = bundle.a.letters.size();
  j["letters"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < bundle.a.letters.size(); ++i) {
    const auto& la = bundle.a.letters[i];
    nlohmann::ordered_json rec;
    rec["id"] = la.id;
    rec["word"] = la.word;
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (int w : la.word) {
      for (std::uint64_t h : bundle.s.letters[w].node_hashes) nodes.push_back(h);
    }
    rec["nodes"] = std::move(nodes);
    rec["class"] = {bundle.s.letters[la.word.front()].class_from,
                    bundle.s.letters[la.word.back()].class_to};
    rec["return_length"] = la.return_length;
    rec["steps"] = la.steps_to_return;
    rec["matrix"] = la.b_matrix.a;
    rec["log_lambda1"] = bundle.spectra.log_lambda1[i];
    rec["omega_at_fixed_point"] = bundle.spectra.log_lambda1[i];
    j["letters"].push_back(std::move(rec));
  }
  emit(ctx, j);
  return kExitOk;
}

int cmd_roof(const Context& ctx, const std::string& file) {
  auto bundle = build_bundle(ctx, file);
  auto slice = cells::base_manifold(bundle.a);
  auto rep = mix::good_roof_check(bundle.a, bundle.spectra, slice, ctx.config.samples / 20);
  nlohmann::ordered_json j;
  j["input"] = file;
  j["input_hash"] = cfg::file_hash(file);
  j["r1"] = rep.r1;
  j["r2"] = rep.r2;
  j["bounded_below"] = rep.bounded_below;
  j["lipschitz_ok"] = rep.lipschitz_ok;
  j["eigendirections_distinct"] = rep.eigendirections_distinct;
  j["periodic_sums_nonadditive"] = rep.periodic_sums_nonadditive;
  j["not_cohomologous"] = rep.not_cohomologous;
  j["max_eigendirection_gap"] = rep.max_eigendirection_gap;
  j["max_additivity_defect"] = rep.max_additivity_defect;
  bool pass = rep.bounded_below && rep.lipschitz_ok && rep.not_cohomologous;
  j["good_roof"] = pass;
  emit(ctx, j);
  return pass ? kExitOk : kExitInvariant;
}

int cmd_pressure(const Context& ctx, const std::string& file, int full_shift, double roof_const,
                 double s_value, double tail_percentile) {
  pressure::ShiftModel model;
  nlohmann::ordered_json j;
  if (full_shift > 0) {
    model.omega.assign(full_shift, roof_const);
    j["model"] = "full-shift";
    j["letters"] = full_shift;
    j["roof_const"] = roof_const;
  } else {
    auto bundle = build_bundle(ctx, file);
    model.omega = bundle.spectra.log_lambda1;
    j["model"] = "alphabet";
    j["input"] = file;
    j["input_hash"] = cfg::file_hash(file);
    j["letters"] = model.omega.size();
  }
  auto est = pressure::gurevich_pressure(model, s_value, 0, ctx.config.pressure_n);
  j["s"] = s_value;
  j["n_max"] = est.n_max;
  j["log_zn"] = est.log_zn;
  j["pressure"] = est.p_hat;
  j["band"] = est.band;
  if (tail_percentile >= 0.0) {
    std::vector<double> sorted = model.omega;
    std::sort(sorted.begin(), sorted.end());
    double r = sorted[static_cast<std::size_t>(tail_percentile * (sorted.size() - 1))];
    auto tail = pressure::tail_exponent(model, r, 4, 1e-6);
    j["tail"] = {{"threshold", tail.threshold},
                 {"delta", tail.delta_hat},
                 {"partial_sums", tail.partial_sums},
                 {"cap_increments", tail.cap_increments},
                 {"increments_decreasing", tail.increments_decreasing}};
  }
  emit(ctx, j);
  return kExitOk;
}

int cmd_mix(const Context& ctx, const std::string& file, double roof_const, double t_max_r1,
            const std::string& svg_path) {
  mix::SuspensionFlow flow;
  nlohmann::ordered_json j;
  if (roof_const > 0.0) {
    flow = mix::make_constant_flow(4, roof_const, roof_const / ctx.config.dt_fraction);
    j["model"] = "constant-roof-control";
  } else {
    auto bundle = build_bundle(ctx, file);
    auto slice = cells::base_manifold(bundle.a);
    auto mesh = cells::make_mesh(slice, ctx.config.mesh_refine);
    auto density = cells::acip(mesh, cells::letter_branches(slice, bundle.a),
                               ctx.config.acip_max_iter, ctx.config.acip_tol);
    double r1 = 1e300;
    for (double w : bundle.spectra.log_lambda1) r1 = std::min(r1, w);
    flow = mix::make_flow(bundle.a, bundle.spectra, slice, mesh, density,
                          r1 / ctx.config.dt_fraction, ctx.config.volume_samples,
                          ctx.config.seed);
    j["model"] = "alphabet";
    j["input"] = file;
    j["input_hash"] = cfg::file_hash(file);
    j["acip_residual"] = density.residual;
    j["acip_range"] = {density.min_density, density.max_density};
    // Density dump: nodal values on the slice mesh, nodes in frame
    // coordinates (see docs/formats.md).
    nlohmann::ordered_json grid;
    grid["nodes"] = nlohmann::ordered_json::array();
    for (const auto& node : mesh.nodes) grid["nodes"].push_back(node);
    grid["values"] = density.density;
    j["density"] = std::move(grid);
  }
  std::vector<int> half;
  for (int x = 0; x < std::max(1, flow.columns() / 2); ++x) half.push_back(x);
  mix::Observable f{half, flow.r1 * 0.4, flow.r1 * 0.35, true};
  auto series = mix::correlation(flow, f, f, t_max_r1 * flow.r1);
  auto fit = mix::decay_rate_fit(series);
  j["r1"] = flow.r1;
  j["dt"] = flow.dt;
  j["t_range"] = {0.0, t_max_r1 * flow.r1};
  j["truncation"] = flow.columns();
  j["c"] = fit.rate;
  j["r2"] = fit.r2;
  j["peaks"] = fit.peaks;
  bool mixing = fit.rate > 0.0 && fit.r2 >= 0.9;
  j["exponential_decay"] = mixing;

  std::string csv_path = ctx.config.out_dir + "/correlation.csv";
  write_text(csv_path, mix::correlation_csv(series));
  j["csv"] = csv_path;
  if (!svg_path.empty()) {
    write_text(svg_path, mix::correlation_svg(series));
    j["svg"] = svg_path;
  }
  emit(ctx, j);
  if (roof_const > 0.0) {
    // The control is expected to fail the mixing signature.
    return mixing ? kExitInvariant : kExitOk;
  }
  return mixing ? kExitOk : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"train-track splitting-sequence laboratory"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path, out_path, arith;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "config JSON file");
  app.add_option("--out", out_path, "report output path (default stdout)");
  app.add_option("--arith", arith, "arithmetic mode: exact|float")
      ->check(CLI::IsMember({"exact", "float"}));
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed override");

  // track
  auto* track_cmd = app.add_subcommand("track", "validate / type / split a track file");
  std::string track_action, track_file, split_dir = "right";
  int split_branch = 0;
  track_cmd->add_option("action", track_action, "validate|type|split")->required();
  track_cmd->add_option("file", track_file, "track file")->required();
  track_cmd->add_option("--branch", split_branch, "large branch number (split)");
  track_cmd->add_option("--dir", split_dir, "left|right (split)")
      ->check(CLI::IsMember({"left", "right"}));

  // graph
  auto* graph_cmd = app.add_subcommand("graph", "build the splitting graph");
  std::string graph_action, graph_file;
  int graph_depth = -1;
  graph_cmd->add_option("action", graph_action, "build")->required();
  graph_cmd->add_option("file", graph_file, "track file")->required();
  graph_cmd->add_option("--depth", graph_depth, "BFS depth (default from config)");

  // alphabet
  auto* alpha_cmd = app.add_subcommand("alphabet", "build the letter alphabets");
  std::string alpha_action, alpha_file;
  alpha_cmd->add_option("action", alpha_action, "build")->required();
  alpha_cmd->add_option("file", alpha_file, "track file")->required();

  // roof
  auto* roof_cmd = app.add_subcommand("roof", "good-roof verdicts");
  std::string roof_action, roof_file;
  roof_cmd->add_option("action", roof_action, "check")->required();
  roof_cmd->add_option("file", roof_file, "track file")->required();

  // pressure
  auto* press_cmd = app.add_subcommand("pressure", "Gurevich pressure and tails");
  std::string press_file;
  int full_shift = 0;
  double roof_const_p = 0.0, s_value = 0.5, tail_pct = -1.0;
  press_cmd->add_option("file", press_file, "track file (omit with --full-shift)");
  press_cmd->add_option("--full-shift", full_shift, "synthetic full shift on N letters");
  press_cmd->add_option("--roof-const", roof_const_p, "constant roof for --full-shift");
  press_cmd->add_option("--s", s_value, "potential parameter");
  press_cmd->add_option("--tail-percentile", tail_pct, "restricted-alphabet cut in [0,1]");

  // mix
  auto* mix_cmd = app.add_subcommand("mix", "suspension flow correlations");
  std::string mix_action, mix_file, svg_path;
  double roof_const_m = 0.0, t_max_r1 = 30.0;
  mix_cmd->add_option("action", mix_action, "correlate")->required();
  mix_cmd->add_option("file", mix_file, "track file (omit with --roof-const)");
  mix_cmd->add_option("--roof-const", roof_const_m, "constant-roof negative control");
  mix_cmd->add_option("--t-max", t_max_r1, "time range in units of r1");
  mix_cmd->add_option("--svg", svg_path, "write an SVG line plot");

  CLI11_PARSE(app, argc, argv);

  try {
    Context ctx;
    if (!config_path.empty()) ctx.config = cfg::Config::from_file(config_path);
    if (seed_opt->count() > 0) ctx.config.seed = seed;
    if (!arith.empty()) ctx.config.arith = arith;
    ctx.out_path = out_path;

    if (track_cmd->parsed()) {
      return cmd_track(ctx, track_action, track_file, split_branch, split_dir);
    }
    if (graph_cmd->parsed()) {
      if (graph_action != "build") fail(Err::IoError, "unknown graph action: " + graph_action);
      return cmd_graph(ctx, graph_file, graph_depth >= 0 ? graph_depth : ctx.config.graph_depth);
    }
    if (alpha_cmd->parsed()) {
      if (alpha_action != "build") {
        fail(Err::IoError, "unknown alphabet action: " + alpha_action);
      }
      return cmd_alphabet(ctx, alpha_file);
    }
    if (roof_cmd->parsed()) {
      if (roof_action != "check") fail(Err::IoError, "unknown roof action: " + roof_action);
      return cmd_roof(ctx, roof_file);
    }
    if (press_cmd->parsed()) {
      if (full_shift <= 0 && press_file.empty()) {
        fail(Err::IoError, "pressure needs a track file or --full-shift");
      }
      return cmd_pressure(ctx, press_file, full_shift, roof_const_p, s_value, tail_pct);
    }
    if (mix_cmd->parsed()) {
      if (mix_action != "correlate") fail(Err::IoError, "unknown mix action: " + mix_action);
      if (roof_const_m <= 0.0 && mix_file.empty()) {
        fail(Err::IoError, "mix needs a track file or --roof-const");
      }
      return cmd_mix(ctx, mix_file, roof_const_m, t_max_r1, svg_path);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Err::IoError ? kExitIo : kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitIo;
}
