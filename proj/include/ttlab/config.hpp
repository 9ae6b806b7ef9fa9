#pragma once

#include <cstdint>
#include <string>

namespace ttlab::cfg {

// Run configuration; serialized into every report for provenance.
struct Config {
  std::string arith = "exact";  // exact | float (sampling lanes)
  double lp_eps = 1e-9;
  double eigen_tol = 1e-12;
  std::uint64_t seed = 1;
  int graph_depth = 6;
  int classes = 2;
  int marked_max_len = 16;
  int word_cap = 0;  // 0 = 2k + 4
  int max_letters_s = 4000;
  int max_return = 6;
  int max_letters_a = 300;
  int mesh_refine = 3;
  int acip_max_iter = 200;
  double acip_tol = 1e-8;
  double dt_fraction = 40.0;  // dt = r1 / dt_fraction
  int pressure_n = 12;
  int samples = 10000;
  int volume_samples = 2000;
  std::string out_dir = ".";
  std::string cache_dir;  // default: TTLAB_CACHE_DIR or .ttlab-cache

  std::string to_json() const;
  static Config from_json(const std::string& text);
  static Config from_file(const std::string& path);
  std::uint64_t hash() const;
  std::string resolved_cache_dir() const;
};

std::uint64_t fnv1a(const std::string& bytes);
std::uint64_t file_hash(const std::string& path);  // IoError when unreadable

}  // namespace ttlab::cfg
