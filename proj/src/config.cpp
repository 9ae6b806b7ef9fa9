#include "ttlab/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ttlab/error.hpp"

namespace ttlab::cfg {

std::string Config::to_json() const {
  nlohmann::ordered_json j;
  j["arith"] = arith;
  j["lp_eps"] = lp_eps;
  j["eigen_tol"] = eigen_tol;
  j["seed"] = seed;
  j["graph_depth"] = graph_depth;
  j["classes"] = classes;
  j["marked_max_len"] = marked_max_len;
  j["word_cap"] = word_cap;
  j["max_letters_s"] = max_letters_s;
  j["max_return"] = max_return;
  j["max_letters_a"] = max_letters_a;
  j["mesh_refine"] = mesh_refine;
  j["acip_max_iter"] = acip_max_iter;
  j["acip_tol"] = acip_tol;
  j["dt_fraction"] = dt_fraction;
  j["pressure_n"] = pressure_n;
  j["samples"] = samples;
  j["volume_samples"] = volume_samples;
  j["out_dir"] = out_dir;
  j["cache_dir"] = cache_dir;
  return j.dump();
}

Config Config::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& ex) {
    fail(Err::IoError, std::string("config parse error: ") + ex.what());
  }
  Config c;
  c.arith = j.value("arith", c.arith);
  c.lp_eps = j.value("lp_eps", c.lp_eps);
  c.eigen_tol = j.value("eigen_tol", c.eigen_tol);
  c.seed = j.value("seed", c.seed);
  c.graph_depth = j.value("graph_depth", c.graph_depth);
  c.classes = j.value("classes", c.classes);
  c.marked_max_len = j.value("marked_max_len", c.marked_max_len);
  c.word_cap = j.value("word_cap", c.word_cap);
  c.max_letters_s = j.value("max_letters_s", c.max_letters_s);
  c.max_return = j.value("max_return", c.max_return);
  c.max_letters_a = j.value("max_letters_a", c.max_letters_a);
  c.mesh_refine = j.value("mesh_refine", c.mesh_refine);
  c.acip_max_iter = j.value("acip_max_iter", c.acip_max_iter);
  c.acip_tol = j.value("acip_tol", c.acip_tol);
  c.dt_fraction = j.value("dt_fraction", c.dt_fraction);
  c.pressure_n = j.value("pressure_n", c.pressure_n);
  c.samples = j.value("samples", c.samples);
  c.volume_samples = j.value("volume_samples", c.volume_samples);
  c.out_dir = j.value("out_dir", c.out_dir);
  c.cache_dir = j.value("cache_dir", c.cache_dir);
  if (c.lp_eps <= 0 || c.eigen_tol <= 0 || c.acip_tol <= 0) {
    fail(Err::IoError, "config tolerances must be positive");
  }
  if (c.graph_depth < 0 || c.classes < 1 || c.max_return < 1 || c.mesh_refine < 0) {
    fail(Err::IoError, "config caps must be at least one");
  }
  return c;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::IoError, "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::uint64_t Config::hash() const { return fnv1a(to_json()); }

std::string Config::resolved_cache_dir() const {
  if (!cache_dir.empty()) return cache_dir;
  const char* env = std::getenv("TTLAB_CACHE_DIR");
  return env != nullptr && env[0] != '\0' ? env : ".ttlab-cache";
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::IoError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return fnv1a(ss.str());
}

}  // namespace ttlab::cfg
