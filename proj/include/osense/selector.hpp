#pragma once

#include <string>
#include <vector>

#include "osense/graph.hpp"
#include "osense/kernel.hpp"
#include "osense/sparse_opt.hpp"

namespace osense {

struct EntropyReport {
  int column_index = -1;
  std::vector<double> eigenvalues;  // lambda_a = <Psi_a|O|Psi_a>, per state
  struct Cluster {
    double value;
    int multiplicity;
  };
  std::vector<Cluster> clusters;
  double entropy = 0.0;  // nats
};

// Eigenvalue clustering + Shannon entropy of multiplicity fractions for a
// kernel element. The expectation values are exact eigenvalues on the sampled
// span only because the variance vanishes there; a variance guard enforces
// that precondition (threshold 1e3 * kernel_tol relative to covariance scale).
EntropyReport spectral_entropy(const CoeffVector& c, const std::vector<CovarianceMatrix>& mats,
                               double cluster_tol = 1e-6, double kernel_tol = 1e-10);

// Column of the sparse basis maximizing spectral entropy; ties broken by
// smallest l1 norm, then lowest index.
struct Selection {
  int column = -1;
  EntropyReport report;
  bool low_confidence = false;  // every column had zero entropy
};
Selection select_hamiltonian(const SparseBasis& k, const std::vector<CovarianceMatrix>& mats,
                             double cluster_tol = 1e-6, double kernel_tol = 1e-10);

struct RecoveredGeometry {
  std::vector<std::pair<int, int>> edges;
  std::vector<double> edge_scores;
  int source_column = -1;
  bool empty_flagged = false;  // no two-body support at all
};

// Edge (i,j) present iff max(|c_ZZ|, |c_Hop|) clears geo_eps relative to the
// largest two-body entry; one- and three-body entries are ignored.
RecoveredGeometry read_geometry(const CoeffVector& c, const OperatorBasis& basis,
                                double geo_eps = 0.05);

struct SuccessResult {
  bool success = false;
  std::string reason;
};

// Synthetic-data success test: entropy at least that of the true H on the
// same sample, and edge set equal to the truth up to insertions/deletions on
// the swap-symmetric pairs (the H - alpha*F ambiguity class).
SuccessResult evaluate_success(const RecoveredGeometry& candidate, const EntropyReport& cand_entropy,
                               double truth_entropy, const InteractionGraph& truth,
                               const std::vector<std::pair<int, int>>& kernel_f_pairs);

struct DualityCrossover {
  double critical_ne = 0.0;
  double critical_fraction = 0.0;  // critical_ne / C(N_v, 2)
  double xi_h(double ne) const;
  double xi_dual(double ne) const;
  double pairs = 0.0;  // P = C(N_v, 2)
};

// Normalized complexity ratio xi = E[|O|_1 / |O|_2] for the random-sign
// Hamiltonian vs the complement-graph dual; the crossover edge count is where
// the two coincide (bisection on [1, P]).
DualityCrossover duality_crossover(int n_vertices);

}  // namespace osense
