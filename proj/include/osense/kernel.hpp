#pragma once

#include <Eigen/Core>
#include <vector>

#include "osense/eigensolver.hpp"
#include "osense/spin.hpp"

namespace osense {

// Ordered Sz-conserving dictionary: all Z, then ZZ, Hop, ZZZ, HopZ, each
// block lexicographic in its site indices. The order is a stable contract;
// coefficient vectors are always expressed in it.
struct OperatorBasis {
  int n_sites = 0;
  std::vector<BasisOperator> ops;

  int size() const { return static_cast<int>(ops.size()); }

  int z_index(int i) const;
  int zz_index(int i, int j) const;
  int hop_index(int i, int j) const;
  int zzz_index(int i, int j, int k) const;   // i < j < k
  int hopz_index(int i, int j, int k) const;  // i < j, k distinct

  double hs_norm(int idx) const { return ops[idx].hs_norm(n_sites); }
};

OperatorBasis build_operator_basis(int n_sites);

using CoeffVector = Eigen::VectorXd;

// sum_i c_i W_i / hs_norm(W_i) applied to a state (unit-HS-norm convention).
SectorState apply_coeff_operator(const CoeffVector& c, const OperatorBasis& basis,
                                 const SectorState& s);

// Covariance of the unit-HS-norm dictionary on one state:
// M_ij = <W_i psi | W_j psi> - <W_i><W_j>. The per-operator means are kept
// because expectation values <psi|O|psi> = c . mean are reused downstream.
struct CovarianceMatrix {
  Eigen::MatrixXd m;
  Eigen::VectorXd mean;
  int state_index = -1;
};

CovarianceMatrix covariance_matrix(const SectorState& state, const OperatorBasis& basis,
                                   int state_index = -1);

std::vector<CovarianceMatrix> covariance_matrices(const EigenSample& sample,
                                                  const OperatorBasis& basis);

double variance_of(const CoeffVector& c, const CovarianceMatrix& m);

struct KernelBasis {
  Eigen::MatrixXd columns;  // N_W x D_K, orthonormal
  int dim = 0;
  struct GapReport {
    double last_kept = 0.0;   // largest eigenvalue inside the kernel
    double first_out = 0.0;   // smallest eigenvalue outside
    double top = 0.0;         // largest covariance eigenvalue
    double ratio = 0.0;       // first_out / max(last_kept, tiny)
    bool reliable = false;    // ratio >= 1e3
  } gap;
  Eigen::VectorXd spectrum;  // full ascending covariance-sum spectrum
};

// Joint null space of the covariance matrices, via one eigendecomposition of
// their sum (a sum of PSD matrices vanishes exactly on the intersection of
// kernels). Threshold is kernel_tol relative to the top eigenvalue.
KernelBasis joint_kernel(const std::vector<CovarianceMatrix>& mats, double kernel_tol = 1e-10);

}  // namespace osense
