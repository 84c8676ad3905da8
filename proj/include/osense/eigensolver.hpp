#pragma once

#include <Eigen/Core>
#include <memory>
#include <optional>

#include "osense/graph.hpp"
#include "osense/spin.hpp"

namespace osense {

// Heisenberg Hamiltonian restricted to a fixed-magnetization sector:
// H = sum_edges J_ij (sigma^z sigma^z + 2 Hop). Stored as a diagonal plus an
// explicit list of hop entries; a dense copy is kept for small sectors.
struct SectorHamiltonian {
  InteractionGraph graph;
  std::shared_ptr<const SectorBasis> basis;

  Eigen::VectorXd diag;
  struct HopEntry {
    std::int32_t row, col;  // row < col
    double val;
  };
  std::vector<HopEntry> hops;
  std::optional<Eigen::MatrixXd> dense;

  Eigen::Index dim() const { return diag.size(); }
  void matvec(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  Eigen::MatrixXd matmat(const Eigen::MatrixXd& x) const;
  double trace() const { return diag.sum(); }
};

inline constexpr Eigen::Index kDenseDimLimit = 4096;

SectorHamiltonian build_hamiltonian(const InteractionGraph& g, int n_up);

struct EigenSample {
  std::shared_ptr<const SectorBasis> basis;
  Eigen::MatrixXd states;    // dim x n, orthonormal columns
  Eigen::VectorXd energies;  // ascending
  bool degeneracy_extended = false;

  int n_states() const { return static_cast<int>(energies.size()); }
  SectorState state(int a) const { return SectorState{basis, states.col(a)}; }
};

// Lowest n_requested eigenpairs, extended to complete any degenerate
// multiplet straddling the cut. Dense path for dim <= kDenseDimLimit,
// block Krylov with full reorthogonalization above.
EigenSample lowest_eigenstates(const SectorHamiltonian& h, int n_requested,
                               double degeneracy_tol = 1e-8,
                               std::uint64_t start_seed = 0x6f73656e7365ULL);

}  // namespace osense
