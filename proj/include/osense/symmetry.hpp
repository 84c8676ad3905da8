#pragma once

#include <string>
#include <vector>

#include "osense/kernel.hpp"

namespace osense {

enum class SymClass { A, B, C, D, E, F, G, Hamiltonian };

std::string to_string(SymClass c);

// Analytic conserved/redundant operator expressed in the canonical dictionary
// (unit-HS-norm coordinates, unit l2 coefficient vector).
struct SymmetryClassOperator {
  SymClass class_label;
  std::vector<int> params;  // site indices, meaning depends on class
  CoeffVector coeffs;
};

// Classes A-E (geometry independent): A = sum Z_i; B_i = Z_i sum_{j!=i} Z_j;
// C_ij = Z_i + Z_j + Z_i Z_j sum_k Z_k; D_ij = (XX+YY)_ij sum_k Z_k;
// E = sum over pairs of (XX+YY). Counts 1, N_v, C(N_v,2), C(N_v,2), 1.
std::vector<SymmetryClassOperator> build_intrinsic_set(const OperatorBasis& basis);

// Coefficient vector of H itself (class Hamiltonian).
SymmetryClassOperator hamiltonian_operator(const OperatorBasis& basis, const InteractionGraph& g);

// Classes F and G for verified swap-automorphism pairs: F_mn = sigma_m .
// sigma_n; G_mnk = (sigma_m . sigma_n - 1) Z_k for each k != m,n.
std::vector<SymmetryClassOperator> build_geometric_set(const OperatorBasis& basis,
                                                       const InteractionGraph& g,
                                                       const std::vector<std::pair<int, int>>& pairs);

struct VarianceCheck {
  SymClass class_label;
  std::vector<int> params;
  double max_variance = 0.0;
  bool expected_zero = false;  // per the class's applicability condition
  bool passed = false;
  std::string note;
};

struct VerificationReport {
  std::vector<VarianceCheck> checks;
  bool all_consistent = true;  // every expected-zero op has variance <= tol
};

// Verifies the zero-variance identities on a sample from the Sz=0 sector.
// Classes A-E must vanish on every state; F only for automorphism pairs; G
// additionally requires all sampled states in a single F eigensector (the
// note records which).
VerificationReport verify_zero_variance(const std::vector<SymmetryClassOperator>& ops,
                                        const EigenSample& sample,
                                        const std::vector<CovarianceMatrix>& mats,
                                        double tol = 1e-10);

}  // namespace osense
