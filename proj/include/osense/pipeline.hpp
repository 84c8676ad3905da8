#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "osense/config.hpp"
#include "osense/extract.hpp"
#include "osense/selector.hpp"
#include "osense/symmetry.hpp"

namespace osense {

struct InstanceResult {
  std::uint64_t point_index = 0;
  std::uint64_t instance_index = 0;
  InteractionGraph graph;
  std::string coupling_mode;
  std::vector<double> energies;
  bool degeneracy_extended = false;
  int d_kernel = 0;
  KernelBasis::GapReport gap;
  std::vector<std::pair<int, int>> f_pairs;  // coupling-preserving swap automorphisms
  int selected_column = -1;
  EntropyReport selected_entropy;
  double truth_entropy = 0.0;
  bool low_confidence = false;
  std::vector<std::pair<int, int>> recovered_edges;
  bool success = false;
  std::string reason;
  std::vector<std::pair<int, int>> duplicates;
  int refill_count = 0;
  int generator_count = -1;
  std::vector<std::string> generator_labels;
  bool extraction_partial = false;
  bool failed = false;
  std::string error_message;
  double seconds = 0.0;
};

// Full learning pipeline on one instance: eigenstates -> covariances ->
// kernel -> sparsify -> entropy selection -> geometry -> success evaluation.
// If `graph` is given it is used as-is; otherwise a connected ER graph is
// sampled from the instance's derived seed stream.
InstanceResult run_instance(const RunConfig& cfg, std::uint64_t point_index,
                            std::uint64_t instance_index, int n_edges, CouplingMode mode,
                            std::optional<InteractionGraph> graph = std::nullopt);

nlohmann::json instance_to_json(const InstanceResult& r, bool with_timing);

// Subcommand drivers; each writes manifest.json (and friends) to cfg.out_dir
// and returns the manifest.
nlohmann::json run_single(const RunConfig& cfg);
nlohmann::json run_sweep(const RunConfig& cfg);  // also writes sweep.csv
nlohmann::json run_lattice(const RunConfig& cfg);
nlohmann::json run_extract(const RunConfig& cfg);

// Zero-variance identities + lattice kernel-dimension checks; `ok` is false
// on any violation.
struct VerifyOutcome {
  nlohmann::json report;
  bool ok = true;
};
VerifyOutcome run_verify(const RunConfig& cfg);

nlohmann::json crossover_json(int n_vertices);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace osense
