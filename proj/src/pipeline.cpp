#include "osense/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace osense {

namespace {

std::uint64_t stream_seed(const RunConfig& cfg, std::uint64_t point, std::uint64_t inst,
                          std::uint64_t purpose) {
  return Rng::derive(cfg.master_seed, {point, inst, purpose}).next_u64();
}

std::vector<std::string> match_generator_labels(const GeneratorSet& gens,
                                                const OperatorBasis& basis,
                                                const InteractionGraph& g,
                                                const std::vector<std::pair<int, int>>& f_pairs) {
  std::vector<SymmetryClassOperator> oracle = build_intrinsic_set(basis);
  oracle.push_back(hamiltonian_operator(basis, g));
  auto geo = build_geometric_set(basis, g, f_pairs);
  oracle.insert(oracle.end(), geo.begin(), geo.end());

  std::vector<std::string> labels;
  for (const auto& gen : gens.generators) {
    std::string label = "unmatched";
    for (const auto& op : oracle) {
      if (std::abs(gen.dot(op.coeffs)) >= 0.999) {
        label = to_string(op.class_label);
        for (int p : op.params) label += "_" + std::to_string(p);
        break;
      }
    }
    labels.push_back(label);
  }
  return labels;
}

}  // namespace

InstanceResult run_instance(const RunConfig& cfg, std::uint64_t point_index,
                            std::uint64_t instance_index, int n_edges, CouplingMode mode,
                            std::optional<InteractionGraph> graph) {
  InstanceResult res;
  res.point_index = point_index;
  res.instance_index = instance_index;
  res.coupling_mode = to_string(mode);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    InteractionGraph g;
    if (graph) {
      g = std::move(*graph);
    } else {
      Rng graph_rng(stream_seed(cfg, point_index, instance_index, 1));
      g = sample_connected_er(cfg.n_vertices, n_edges, graph_rng);
      Rng coupling_rng(stream_seed(cfg, point_index, instance_index, 2));
      g = assign_couplings(std::move(g), mode, coupling_rng);
    }
    res.graph = g;

    const auto h = build_hamiltonian(g, g.n_vertices / 2);
    const EigenSample sample = lowest_eigenstates(h, cfg.n_states, cfg.degeneracy_tol);
    res.energies.assign(sample.energies.data(), sample.energies.data() + sample.energies.size());
    res.degeneracy_extended = sample.degeneracy_extended;

    const OperatorBasis basis = build_operator_basis(g.n_vertices);
    const auto mats = covariance_matrices(sample, basis);
    const KernelBasis kernel = joint_kernel(mats, cfg.kernel_tol);
    res.d_kernel = kernel.dim;
    res.gap = kernel.gap;
    res.f_pairs = find_coupling_swap_automorphisms(g);
    if (kernel.dim == 0) throw std::runtime_error("empty parent operator subspace");

    const std::uint64_t opt_seed = stream_seed(cfg, point_index, instance_index, 3);
    StageReport report;
    const Eigen::MatrixXd rot = stage1_l3_rotate(kernel.columns, cfg.stage1, opt_seed, &report);
    SparseBasis sparse = stage2_l1_refine(kernel.columns, rot, cfg.stage2, std::move(report));
    detect_duplicates(sparse, kernel.columns, cfg.cos_tol);
    res.duplicates = sparse.report.duplicates;
    res.refill_count = sparse.report.refill_count;

    // Entropy selection on the exact kernel elements, geometry readout on the
    // thresholded columns.
    const Selection sel = select_hamiltonian(sparse, mats, cfg.cluster_tol, cfg.kernel_tol);
    res.selected_column = sel.column;
    res.selected_entropy = sel.report;
    res.low_confidence = sel.low_confidence;

    const SymmetryClassOperator truth = hamiltonian_operator(basis, g);
    res.truth_entropy =
        spectral_entropy(truth.coeffs, mats, cfg.cluster_tol, cfg.kernel_tol).entropy;

    SparseBasis thresholded = sparse;
    hard_threshold(thresholded, cfg.rel_eps);
    const RecoveredGeometry geo =
        read_geometry(thresholded.columns.col(sel.column), basis, cfg.geo_eps);
    res.recovered_edges = geo.edges;

    const SuccessResult outcome =
        evaluate_success(geo, sel.report, res.truth_entropy, g, res.f_pairs);
    res.success = outcome.success;
    res.reason = outcome.reason;

    if (cfg.extract_generators) {
      const SketchContext ctx =
          make_sketch_context(sample.basis, basis, cfg.r_probes,
                              stream_seed(cfg, point_index, instance_index, 4));
      const GeneratorSet gens =
          extract_generators(thresholded, ctx, cfg.independence_tol, cfg.basis_cap);
      res.generator_count = static_cast<int>(gens.generators.size());
      res.extraction_partial = gens.partial;
      res.generator_labels = match_generator_labels(gens, basis, g, res.f_pairs);
    }
  } catch (const std::exception& e) {
    res.failed = true;
    res.error_message = e.what();
    res.success = false;
    res.reason = "instance error";
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

nlohmann::json instance_to_json(const InstanceResult& r, bool with_timing) {
  nlohmann::json j;
  j["point_index"] = r.point_index;
  j["instance_index"] = r.instance_index;
  j["coupling_mode"] = r.coupling_mode;
  j["graph"] = nlohmann::json::parse(graph_to_json(r.graph));
  j["energies"] = r.energies;
  j["degeneracy_extended"] = r.degeneracy_extended;
  j["d_kernel"] = r.d_kernel;
  j["gap"] = {{"last_kept", r.gap.last_kept},
              {"first_out", std::isfinite(r.gap.first_out) ? r.gap.first_out : -1.0},
              {"top", r.gap.top},
              {"ratio", std::isfinite(r.gap.ratio) ? r.gap.ratio : -1.0},
              {"reliable", r.gap.reliable}};
  j["f_pairs"] = r.f_pairs;
  j["selected_column"] = r.selected_column;
  j["entropy"] = r.selected_entropy.entropy;
  j["eigenvalues_on_sample"] = r.selected_entropy.eigenvalues;
  auto clusters = nlohmann::json::array();
  for (const auto& c : r.selected_entropy.clusters)
    clusters.push_back({{"value", c.value}, {"multiplicity", c.multiplicity}});
  j["clusters"] = clusters;
  j["truth_entropy"] = r.truth_entropy;
  j["low_confidence"] = r.low_confidence;
  j["recovered_edges"] = r.recovered_edges;
  j["success"] = r.success;
  j["reason"] = r.reason;
  j["duplicates"] = r.duplicates;
  j["refill_count"] = r.refill_count;
  if (r.generator_count >= 0) {
    j["generator_count"] = r.generator_count;
    j["generator_labels"] = r.generator_labels;
    j["extraction_partial"] = r.extraction_partial;
  }
  j["failed"] = r.failed;
  if (r.failed) j["error"] = r.error_message;
  if (with_timing) j["seconds"] = r.seconds;
  return j;
}

namespace {

struct Job {
  std::uint64_t point_index;
  std::uint64_t instance_index;
  int n_edges;
  CouplingMode mode;
  std::optional<InteractionGraph> graph;
};

// Bounded worker pool; result order is by job index regardless of scheduling.
std::vector<InstanceResult> run_jobs(const RunConfig& cfg, const std::vector<Job>& jobs) {
  std::vector<InstanceResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      results[i] =
          run_instance(cfg, jobs[i].point_index, jobs[i].instance_index, jobs[i].n_edges,
                       jobs[i].mode, jobs[i].graph);
    }
  };
  const int n = std::max(1, std::min<int>(cfg.n_workers, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;
}

nlohmann::json manifest_skeleton(const RunConfig& cfg) {
  nlohmann::json m;
  m["config"] = config_to_json(cfg);
  // Operational knobs that do not affect results are excluded so manifests
  // from equivalent runs compare byte-identical.
  m["config"].erase("n_workers");
  m["config"].erase("out_dir");
  m["instances"] = nlohmann::json::array();
  return m;
}

void add_aggregate(nlohmann::json& manifest, const std::vector<InstanceResult>& results) {
  int n_success = 0;
  double dk_sum = 0.0;
  for (const auto& r : results) {
    if (r.success) ++n_success;
    dk_sum += r.d_kernel;
  }
  manifest["aggregate"] = {
      {"n_instances", results.size()},
      {"n_success", n_success},
      {"success_rate", results.empty() ? 0.0 : double(n_success) / results.size()},
      {"mean_DK", results.empty() ? 0.0 : dk_sum / results.size()}};
}

void write_manifest(const RunConfig& cfg, const nlohmann::json& manifest) {
  std::filesystem::create_directories(cfg.out_dir);
  write_text_file(cfg.out_dir + "/manifest.json", manifest.dump(2) + "\n");
}

void write_graphs(const RunConfig& cfg, const std::vector<InstanceResult>& results) {
  for (const auto& r : results) {
    if (r.failed) continue;
    std::ostringstream name;
    name << cfg.out_dir << "/graph_" << r.point_index << "_" << r.instance_index << ".json";
    write_text_file(name.str(), graph_to_json(r.graph) + "\n");
  }
}

}  // namespace

nlohmann::json run_single(const RunConfig& cfg) {
  const CouplingMode mode = coupling_mode_from_string(cfg.coupling_mode);
  std::vector<Job> jobs;
  for (int i = 0; i < cfg.n_instances; ++i)
    jobs.push_back({0, static_cast<std::uint64_t>(i), cfg.n_edges, mode, std::nullopt});
  const auto results = run_jobs(cfg, jobs);
  nlohmann::json manifest = manifest_skeleton(cfg);
  for (const auto& r : results) manifest["instances"].push_back(instance_to_json(r, cfg.record_timings));
  add_aggregate(manifest, results);
  write_manifest(cfg, manifest);
  write_graphs(cfg, results);
  return manifest;
}

nlohmann::json run_lattice(const RunConfig& cfg) {
  const InteractionGraph g = regular_lattice(lattice_kind_from_string(cfg.lattice), cfg.n_vertices);
  std::vector<Job> jobs{{0, 0, static_cast<int>(g.edges.size()), CouplingMode::AFM, g}};
  const auto results = run_jobs(cfg, jobs);
  nlohmann::json manifest = manifest_skeleton(cfg);
  manifest["instances"].push_back(instance_to_json(results[0], cfg.record_timings));
  add_aggregate(manifest, results);
  write_manifest(cfg, manifest);
  write_graphs(cfg, results);
  return manifest;
}

nlohmann::json run_extract(const RunConfig& cfg) {
  RunConfig c = cfg;
  c.extract_generators = true;
  const CouplingMode mode = coupling_mode_from_string(c.coupling_mode);
  std::vector<Job> jobs;
  const int n = std::max(1, c.n_instances);
  for (int i = 0; i < n; ++i)
    jobs.push_back({0, static_cast<std::uint64_t>(i), c.n_edges, mode, std::nullopt});
  const auto results = run_jobs(c, jobs);
  nlohmann::json manifest = manifest_skeleton(c);
  for (const auto& r : results) manifest["instances"].push_back(instance_to_json(r, c.record_timings));
  add_aggregate(manifest, results);
  write_manifest(c, manifest);
  write_graphs(c, results);
  return manifest;
}

nlohmann::json run_sweep(const RunConfig& cfg) {
  const std::vector<int> points = sweep_points(cfg);
  std::vector<CouplingMode> modes;
  if (cfg.coupling_mode == "both") {
    modes = {CouplingMode::AFM, CouplingMode::RandomSign};
  } else {
    modes = {coupling_mode_from_string(cfg.coupling_mode)};
  }

  std::vector<Job> jobs;
  for (CouplingMode mode : modes)
    for (int ne : points)
      for (int i = 0; i < cfg.n_instances; ++i) {
        // The point key depends on (N_e, mode), not grid position, so seeds
        // are stable under regridding.
        const std::uint64_t key =
            2ULL * static_cast<std::uint64_t>(ne) + (mode == CouplingMode::RandomSign ? 1 : 0);
        jobs.push_back({key, static_cast<std::uint64_t>(i), ne, mode, std::nullopt});
      }
  const auto results = run_jobs(cfg, jobs);

  nlohmann::json manifest = manifest_skeleton(cfg);
  for (const auto& r : results) manifest["instances"].push_back(instance_to_json(r, cfg.record_timings));
  add_aggregate(manifest, results);

  // Per-point aggregation, in job construction order.
  std::ostringstream csv;
  csv << "N_e,mode,n_instances,n_success,success_rate,mean_DK\n";
  auto sweep_summary = nlohmann::json::array();
  std::size_t at = 0;
  for (CouplingMode mode : modes)
    for (int ne : points) {
      int n_success = 0;
      double dk_sum = 0.0;
      for (int i = 0; i < cfg.n_instances; ++i, ++at) {
        if (results[at].success) ++n_success;
        dk_sum += results[at].d_kernel;
      }
      const double rate = cfg.n_instances > 0 ? double(n_success) / cfg.n_instances : 0.0;
      const double mean_dk = cfg.n_instances > 0 ? dk_sum / cfg.n_instances : 0.0;
      char line[160];
      std::snprintf(line, sizeof(line), "%d,%s,%d,%d,%.6f,%.6f\n", ne, to_string(mode).c_str(),
                    cfg.n_instances, n_success, rate, mean_dk);
      csv << line;
      sweep_summary.push_back({{"N_e", ne},
                               {"mode", to_string(mode)},
                               {"n_instances", cfg.n_instances},
                               {"n_success", n_success},
                               {"success_rate", rate},
                               {"mean_DK", mean_dk}});
    }
  manifest["sweep"] = sweep_summary;
  write_manifest(cfg, manifest);
  std::filesystem::create_directories(cfg.out_dir);
  write_text_file(cfg.out_dir + "/sweep.csv", csv.str());
  return manifest;
}

VerifyOutcome run_verify(const RunConfig& cfg) {
  VerifyOutcome out;
  out.report["checks"] = nlohmann::json::array();
  auto record = [&](const std::string& what, bool ok, const nlohmann::json& detail) {
    out.report["checks"].push_back({{"what", what}, {"ok", ok}, {"detail", detail}});
    if (!ok) out.ok = false;
  };

  const OperatorBasis basis = build_operator_basis(cfg.n_vertices);
  const int baseline = cfg.n_vertices * cfg.n_vertices + 3;
  // The closed-form baseline dimension is exact for N_v >= 10; smaller
  // sectors leave additional accidental null directions, so there the
  // measured kernel is only required to contain the analytic one.
  const bool exact_baseline = cfg.n_vertices >= 10;
  auto check_baseline = [&](int dim) { return exact_baseline ? dim == baseline : dim >= baseline; };
  const char* baseline_rule = exact_baseline ? "equal" : "at_least";

  // A degenerate multiplet inside the sample yields arbitrary mixtures within
  // the degenerate subspace; those states need not be total-spin eigenstates,
  // so the Casimir identity (class E) is only informational for them.
  auto has_internal_degeneracy = [&](const EigenSample& sample) {
    for (int a = 1; a < sample.n_states(); ++a) {
      const double scale = std::max({1.0, std::abs(sample.energies[a - 1]), std::abs(sample.energies[a])});
      if (sample.energies[a] - sample.energies[a - 1] <= cfg.degeneracy_tol * scale) return true;
    }
    return false;
  };

  // Seeded AFM ER instances: zero-variance identities + kernel containment.
  for (int i = 0; i < cfg.n_instances; ++i) {
    Rng graph_rng(stream_seed(cfg, 0, static_cast<std::uint64_t>(i), 1));
    InteractionGraph g = sample_connected_er(cfg.n_vertices, cfg.n_edges, graph_rng);
    const auto h = build_hamiltonian(g, g.n_vertices / 2);
    const EigenSample sample = lowest_eigenstates(h, cfg.n_states, cfg.degeneracy_tol);
    const auto mats = covariance_matrices(sample, basis);
    const KernelBasis kernel = joint_kernel(mats, cfg.kernel_tol);

    std::vector<SymmetryClassOperator> ops = build_intrinsic_set(basis);
    ops.push_back(hamiltonian_operator(basis, g));
    const auto f_pairs = find_coupling_swap_automorphisms(g);
    const auto geo_ops = build_geometric_set(basis, g, f_pairs);
    ops.insert(ops.end(), geo_ops.begin(), geo_ops.end());

    const bool degenerate_sample = has_internal_degeneracy(sample);
    const VerificationReport rep = verify_zero_variance(ops, sample, mats);
    nlohmann::json violations = nlohmann::json::array();
    nlohmann::json informational = nlohmann::json::array();
    double max_resid = 0.0;
    for (std::size_t o = 0; o < ops.size(); ++o) {
      const auto& chk = rep.checks[o];
      const bool e_informational = degenerate_sample && chk.class_label == SymClass::E;
      if (!chk.passed) {
        nlohmann::json entry = {{"class", to_string(chk.class_label)},
                                {"params", chk.params},
                                {"max_variance", chk.max_variance},
                                {"seed_instance", i}};
        if (e_informational)
          informational.push_back(std::move(entry));
        else
          violations.push_back(std::move(entry));
      }
      if (chk.expected_zero && !e_informational) {
        // Expected kernel members must also lie in span(K0).
        const CoeffVector& c = ops[o].coeffs;
        const double resid = (c - kernel.columns * (kernel.columns.transpose() * c)).norm();
        max_resid = std::max(max_resid, resid);
      }
    }
    nlohmann::json zv_detail = violations;
    if (!informational.empty())
      zv_detail = {{"violations", violations}, {"informational_degenerate_sample", informational}};
    record("er_instance_" + std::to_string(i) + "_zero_variance", violations.empty(), zv_detail);
    record("er_instance_" + std::to_string(i) + "_kernel_containment", max_resid <= 1e-6,
           {{"max_projection_residual", max_resid}});
    if (f_pairs.empty() && !sample.degeneracy_extended && !degenerate_sample)
      record("er_instance_" + std::to_string(i) + "_baseline_dimension", check_baseline(kernel.dim),
             {{"d_kernel", kernel.dim}, {"expected", baseline}, {"rule", baseline_rule}});
  }

  // Lattice kernel dimensions.
  for (const char* kind : {"chain", "square_ladder"}) {
    try {
      const InteractionGraph g = regular_lattice(lattice_kind_from_string(kind), cfg.n_vertices);
      const auto h = build_hamiltonian(g, g.n_vertices / 2);
      const EigenSample sample = lowest_eigenstates(h, cfg.n_states, cfg.degeneracy_tol);
      const auto mats = covariance_matrices(sample, basis);
      const KernelBasis kernel = joint_kernel(mats, cfg.kernel_tol);
      record(std::string(kind) + "_baseline_dimension", check_baseline(kernel.dim),
             {{"d_kernel", kernel.dim}, {"expected", baseline}, {"rule", baseline_rule}});
    } catch (const std::exception& e) {
      record(std::string(kind) + "_baseline_dimension", false, {{"error", e.what()}});
    }
  }

  std::filesystem::create_directories(cfg.out_dir);
  write_text_file(cfg.out_dir + "/verify.json", out.report.dump(2) + "\n");
  return out;
}

nlohmann::json crossover_json(int n_vertices) {
  const DualityCrossover dc = duality_crossover(n_vertices);
  nlohmann::json j;
  j["n_vertices"] = n_vertices;
  j["pairs"] = dc.pairs;
  j["critical_Ne"] = dc.critical_ne;
  j["critical_fraction"] = dc.critical_fraction;
  auto curve = nlohmann::json::array();
  for (int ne = 1; ne <= static_cast<int>(dc.pairs); ++ne)
    curve.push_back({{"N_e", ne}, {"xi_H", dc.xi_h(ne)}, {"xi_dual", dc.xi_dual(ne)}});
  j["curve"] = curve;
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace osense
