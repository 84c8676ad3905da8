#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "osense/sparse_opt.hpp"

namespace osense {

struct RunConfig {
  std::string mode = "single";  // single | sweep | verify | lattice | crossover | extract
  int n_vertices = 14;
  int n_edges = 17;
  std::vector<int> sweep_edges;  // explicit sweep points; empty -> min/step/max range
  int sweep_min = -1;
  int sweep_max = -1;
  int sweep_step = 4;
  std::string coupling_mode = "AFM";  // AFM | RandomSign | both (sweep only)
  std::string lattice = "chain";
  int n_states = 5;
  double degeneracy_tol = 1e-8;
  double kernel_tol = 1e-10;
  double rel_eps = 1e-4;
  double geo_eps = 0.05;
  double cluster_tol = 1e-6;
  double cos_tol = 0.999;
  Stage1Options stage1;
  Stage2Options stage2;
  int n_instances = 20;
  std::uint64_t master_seed = 1;
  int n_workers = 1;
  bool record_timings = false;
  bool extract_generators = false;
  int r_probes = 16;
  double independence_tol = 1e-3;
  int basis_cap = 512;
  bool save_kernel_cache = false;
  std::string out_dir = ".";
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);

// --set key=value override with dotted paths (e.g. stage2.max_iters=4000).
void apply_override(RunConfig& c, const std::string& assignment);

// Throws std::invalid_argument on inconsistent settings.
void validate_config(const RunConfig& c);

// Resolved list of sweep edge counts.
std::vector<int> sweep_points(const RunConfig& c);

}  // namespace osense
