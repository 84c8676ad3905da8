#include "osense/config.hpp"

#include <stdexcept>

namespace osense {

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["mode"] = c.mode;
  j["n_vertices"] = c.n_vertices;
  j["n_edges"] = c.n_edges;
  j["sweep_edges"] = c.sweep_edges;
  j["sweep_min"] = c.sweep_min;
  j["sweep_max"] = c.sweep_max;
  j["sweep_step"] = c.sweep_step;
  j["coupling_mode"] = c.coupling_mode;
  j["lattice"] = c.lattice;
  j["n_states"] = c.n_states;
  j["degeneracy_tol"] = c.degeneracy_tol;
  j["kernel_tol"] = c.kernel_tol;
  j["rel_eps"] = c.rel_eps;
  j["geo_eps"] = c.geo_eps;
  j["cluster_tol"] = c.cluster_tol;
  j["cos_tol"] = c.cos_tol;
  j["stage1"] = {{"max_iters", c.stage1.max_iters},
                 {"conv_tol", c.stage1.conv_tol},
                 {"restarts", c.stage1.restarts}};
  j["stage2"] = {{"step", c.stage2.step},         {"decay", c.stage2.decay},
                 {"decay_every", c.stage2.decay_every}, {"max_iters", c.stage2.max_iters},
                 {"conv_tol", c.stage2.conv_tol}, {"window", c.stage2.window},
                 {"stall_windows", c.stage2.stall_windows}};
  j["n_instances"] = c.n_instances;
  j["master_seed"] = c.master_seed;
  j["n_workers"] = c.n_workers;
  j["record_timings"] = c.record_timings;
  j["extract_generators"] = c.extract_generators;
  j["r_probes"] = c.r_probes;
  j["independence_tol"] = c.independence_tol;
  j["basis_cap"] = c.basis_cap;
  j["save_kernel_cache"] = c.save_kernel_cache;
  j["out_dir"] = c.out_dir;
  return j;
}

namespace {
template <typename T>
void get_to_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}
}  // namespace

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  get_to_if(j, "mode", c.mode);
  get_to_if(j, "n_vertices", c.n_vertices);
  get_to_if(j, "n_edges", c.n_edges);
  get_to_if(j, "sweep_edges", c.sweep_edges);
  get_to_if(j, "sweep_min", c.sweep_min);
  get_to_if(j, "sweep_max", c.sweep_max);
  get_to_if(j, "sweep_step", c.sweep_step);
  get_to_if(j, "coupling_mode", c.coupling_mode);
  get_to_if(j, "lattice", c.lattice);
  get_to_if(j, "n_states", c.n_states);
  get_to_if(j, "degeneracy_tol", c.degeneracy_tol);
  get_to_if(j, "kernel_tol", c.kernel_tol);
  get_to_if(j, "rel_eps", c.rel_eps);
  get_to_if(j, "geo_eps", c.geo_eps);
  get_to_if(j, "cluster_tol", c.cluster_tol);
  get_to_if(j, "cos_tol", c.cos_tol);
  if (j.contains("stage1")) {
    const auto& s = j.at("stage1");
    get_to_if(s, "max_iters", c.stage1.max_iters);
    get_to_if(s, "conv_tol", c.stage1.conv_tol);
    get_to_if(s, "restarts", c.stage1.restarts);
  }
  if (j.contains("stage2")) {
    const auto& s = j.at("stage2");
    get_to_if(s, "step", c.stage2.step);
    get_to_if(s, "decay", c.stage2.decay);
    get_to_if(s, "decay_every", c.stage2.decay_every);
    get_to_if(s, "max_iters", c.stage2.max_iters);
    get_to_if(s, "conv_tol", c.stage2.conv_tol);
    get_to_if(s, "window", c.stage2.window);
    get_to_if(s, "stall_windows", c.stage2.stall_windows);
  }
  get_to_if(j, "n_instances", c.n_instances);
  get_to_if(j, "master_seed", c.master_seed);
  get_to_if(j, "n_workers", c.n_workers);
  get_to_if(j, "record_timings", c.record_timings);
  get_to_if(j, "extract_generators", c.extract_generators);
  get_to_if(j, "r_probes", c.r_probes);
  get_to_if(j, "independence_tol", c.independence_tol);
  get_to_if(j, "basis_cap", c.basis_cap);
  get_to_if(j, "save_kernel_cache", c.save_kernel_cache);
  get_to_if(j, "out_dir", c.out_dir);
  return c;
}

void apply_override(RunConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("override must look like key=value: " + assignment);
  const std::string key = assignment.substr(0, eq);
  const std::string val = assignment.substr(eq + 1);
  nlohmann::json j = config_to_json(c);
  nlohmann::json* node = &j;
  std::size_t pos = 0;
  while (true) {
    const auto dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot - pos);
    if (dot == std::string::npos) {
      nlohmann::json parsed = nlohmann::json::parse(val, nullptr, false);
      (*node)[part] = parsed.is_discarded() ? nlohmann::json(val) : parsed;
      break;
    }
    node = &(*node)[part];
    pos = dot + 1;
  }
  c = config_from_json(j);
}

std::vector<int> sweep_points(const RunConfig& c) {
  if (!c.sweep_edges.empty()) return c.sweep_edges;
  std::vector<int> pts;
  if (c.sweep_min >= 0 && c.sweep_max >= c.sweep_min)
    for (int e = c.sweep_min; e <= c.sweep_max; e += std::max(1, c.sweep_step)) pts.push_back(e);
  return pts;
}

void validate_config(const RunConfig& c) {
  const auto bad = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (c.n_vertices < 2 || c.n_vertices > 24) bad("n_vertices out of range");
  const int max_edges = c.n_vertices * (c.n_vertices - 1) / 2;
  if (c.mode == "single" || c.mode == "sweep" || c.mode == "extract") {
    if (c.n_vertices % 2 != 0) bad("n_vertices must be even (Sz=0 sector)");
  }
  if (c.mode == "single" || c.mode == "extract") {
    if (c.n_edges < c.n_vertices - 1 || c.n_edges > max_edges) bad("n_edges out of range");
  }
  if (c.mode == "sweep") {
    for (int e : sweep_points(c))
      if (e < c.n_vertices - 1 || e > max_edges) bad("sweep point out of [N_v-1, C(N_v,2)]");
  }
  if (c.n_states < 1) bad("n_states must be positive");
  if (c.n_instances < 0) bad("n_instances must be nonnegative");
  if (c.n_workers < 1) bad("n_workers must be positive");
  for (double t : {c.degeneracy_tol, c.kernel_tol, c.rel_eps, c.geo_eps, c.cluster_tol, c.cos_tol,
                   c.independence_tol, c.stage1.conv_tol, c.stage2.conv_tol, c.stage2.step})
    if (t <= 0.0) bad("tolerances and steps must be positive");
}

}  // namespace osense
