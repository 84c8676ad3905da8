#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>

#include "osense/pipeline.hpp"

namespace py = pybind11;
using namespace osense;

namespace {

// Holds the per-instance state (eigenstates, covariances, kernel, sparse
// basis) so the pipeline stages can be driven step by step from Python.
class Learner {
 public:
  Learner(const std::string& graph_json, int n_states, double degeneracy_tol)
      : graph_(graph_from_json(graph_json)),
        basis_(build_operator_basis(graph_.n_vertices)) {
    const auto h = build_hamiltonian(graph_, graph_.n_vertices / 2);
    sample_ = lowest_eigenstates(h, n_states, degeneracy_tol);
    mats_ = covariance_matrices(sample_, basis_);
  }

  std::vector<double> energies() const {
    return {sample_.energies.data(), sample_.energies.data() + sample_.energies.size()};
  }
  int dictionary_size() const { return basis_.size(); }

  Eigen::MatrixXd kernel(double kernel_tol) {
    kernel_ = joint_kernel(mats_, kernel_tol);
    return kernel_->columns;
  }
  int kernel_dim() const { return kernel_ ? kernel_->dim : -1; }
  Eigen::VectorXd kernel_spectrum() const {
    if (!kernel_) throw std::runtime_error("call kernel() first");
    return kernel_->spectrum;
  }

  Eigen::MatrixXd sparsify_kernel(std::uint64_t seed, double rel_eps, double cos_tol) {
    if (!kernel_) throw std::runtime_error("call kernel() first");
    StageReport report;
    const Eigen::MatrixXd rot = stage1_l3_rotate(kernel_->columns, Stage1Options{}, seed, &report);
    sparse_ = stage2_l1_refine(kernel_->columns, rot, Stage2Options{}, std::move(report));
    detect_duplicates(*sparse_, kernel_->columns, cos_tol);
    thresholded_ = *sparse_;
    hard_threshold(*thresholded_, rel_eps);
    return thresholded_->columns;
  }

  py::dict select(double cluster_tol, double kernel_tol) {
    if (!sparse_) throw std::runtime_error("call sparsify_kernel() first");
    const Selection sel = select_hamiltonian(*sparse_, mats_, cluster_tol, kernel_tol);
    selected_ = sel.column;
    py::dict d;
    d["column"] = sel.column;
    d["entropy"] = sel.report.entropy;
    d["eigenvalues"] = sel.report.eigenvalues;
    d["low_confidence"] = sel.low_confidence;
    return d;
  }

  std::vector<std::pair<int, int>> geometry(double geo_eps) const {
    if (!thresholded_ || selected_ < 0) throw std::runtime_error("call select() first");
    return read_geometry(thresholded_->columns.col(selected_), basis_, geo_eps).edges;
  }

  double variance(const Eigen::VectorXd& c) const {
    double v = 0.0;
    for (const auto& m : mats_) v = std::max(v, variance_of(c, m));
    return v;
  }

  double entropy_of(const Eigen::VectorXd& c, double cluster_tol, double kernel_tol) const {
    return spectral_entropy(c, mats_, cluster_tol, kernel_tol).entropy;
  }

  Eigen::VectorXd hamiltonian_coeffs() const {
    return hamiltonian_operator(basis_, graph_).coeffs;
  }

 private:
  InteractionGraph graph_;
  OperatorBasis basis_;
  EigenSample sample_;
  std::vector<CovarianceMatrix> mats_;
  std::optional<KernelBasis> kernel_;
  std::optional<SparseBasis> sparse_;
  std::optional<SparseBasis> thresholded_;
  int selected_ = -1;
};

}  // namespace

PYBIND11_MODULE(_osense, m) {
  m.doc() = "Operator learning for spin-1/2 Heisenberg systems from low-lying eigenstates";

  m.def("sample_er_graph",
        [](int n_vertices, int n_edges, std::uint64_t seed, const std::string& mode) {
          Rng g(Rng::derive(seed, {0, 0, 1}).next_u64());
          auto graph = sample_connected_er(n_vertices, n_edges, g);
          Rng c(Rng::derive(seed, {0, 0, 2}).next_u64());
          graph = assign_couplings(std::move(graph), coupling_mode_from_string(mode), c);
          return graph_to_json(graph);
        },
        py::arg("n_vertices"), py::arg("n_edges"), py::arg("seed"), py::arg("mode") = "AFM",
        "Connected Erdos-Renyi interaction graph as JSON");

  m.def("lattice_graph",
        [](const std::string& kind, int n_vertices) {
          return graph_to_json(regular_lattice(lattice_kind_from_string(kind), n_vertices));
        },
        py::arg("kind"), py::arg("n_vertices"));

  m.def("swap_automorphisms",
        [](const std::string& graph_json) {
          return find_coupling_swap_automorphisms(graph_from_json(graph_json));
        },
        py::arg("graph_json"));

  m.def("crossover",
        [](int n_vertices) { return crossover_json(n_vertices).dump(); },
        py::arg("n_vertices"), "Duality crossover curve as JSON");

  m.def("run_single",
        [](const std::string& config_json) {
          RunConfig cfg = config_from_json(nlohmann::json::parse(config_json));
          cfg.mode = "single";
          validate_config(cfg);
          return run_single(cfg).dump();
        },
        py::arg("config_json"), "Full ensemble run; writes outputs and returns the manifest JSON");

  py::class_<Learner>(m, "Learner")
      .def(py::init<const std::string&, int, double>(), py::arg("graph_json"),
           py::arg("n_states") = 5, py::arg("degeneracy_tol") = 1e-8)
      .def("energies", &Learner::energies)
      .def("dictionary_size", &Learner::dictionary_size)
      .def("kernel", &Learner::kernel, py::arg("kernel_tol") = 1e-10)
      .def("kernel_dim", &Learner::kernel_dim)
      .def("kernel_spectrum", &Learner::kernel_spectrum)
      .def("sparsify_kernel", &Learner::sparsify_kernel, py::arg("seed") = 1,
           py::arg("rel_eps") = 1e-4, py::arg("cos_tol") = 0.999)
      .def("select", &Learner::select, py::arg("cluster_tol") = 1e-6,
           py::arg("kernel_tol") = 1e-10)
      .def("geometry", &Learner::geometry, py::arg("geo_eps") = 0.05)
      .def("variance", &Learner::variance, py::arg("coeffs"))
      .def("entropy_of", &Learner::entropy_of, py::arg("coeffs"), py::arg("cluster_tol") = 1e-6,
           py::arg("kernel_tol") = 1e-10)
      .def("hamiltonian_coeffs", &Learner::hamiltonian_coeffs);
}
