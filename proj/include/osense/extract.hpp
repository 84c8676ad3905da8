#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "osense/kernel.hpp"
#include "osense/sparse_opt.hpp"

namespace osense {

// Operators are compared through their action on a fixed set of random
// sector probes; the sketch map is linear in the operator, so least-squares
// over flattened sketches decides linear independence without dense operator
// matrices.
struct SketchContext {
  std::shared_ptr<const SectorBasis> sector;
  const OperatorBasis* dict = nullptr;
  Eigen::MatrixXd probes;  // dim x r, unit columns

  int r() const { return static_cast<int>(probes.cols()); }
  Eigen::Index flat_size() const { return probes.size(); }
};

SketchContext make_sketch_context(std::shared_ptr<const SectorBasis> sector,
                                  const OperatorBasis& dict, int r_probes, std::uint64_t seed);

// images(:, p) = O applied to probe p (unit-HS-norm coefficient convention).
Eigen::MatrixXd apply_to_probes(const CoeffVector& c, const SketchContext& ctx);

// Second application: O applied to an existing image block, for products.
Eigen::MatrixXd apply_to_images(const CoeffVector& c, const SketchContext& ctx,
                                const Eigen::MatrixXd& images);

struct RepresentResult {
  Eigen::VectorXd coeffs;
  double residual = 1.0;  // relative l2 misfit; empty basis -> 1, zero sketch -> 0
};

RepresentResult represent_in_basis(const Eigen::VectorXd& sketch, const Eigen::MatrixXd& basis);

struct GeneratorSet {
  std::vector<CoeffVector> generators;  // ascending l1
  std::vector<double> l1_norms;
  std::vector<int> source_columns;                 // candidate index per generator
  std::vector<std::pair<int, double>> rejected;    // (candidate index, residual)
  int basis_size = 0;                              // |B| at the end
  bool partial = false;                            // basis_cap reached
};

// Minimal generator extraction: candidates in ascending l1,
// sketch-based independence check against the running product basis, and
// pairwise product expansion (both orders) on accept.
// The tolerance sits well above the optimizer's residual column contamination
// (~1e-5 relative after thresholding, which would otherwise make every
// near-duplicate class column look independent) and well below the O(1)
// relative misfit of genuinely new actions.
GeneratorSet extract_generators(const SparseBasis& k, const SketchContext& ctx,
                                double independence_tol = 1e-3, int basis_cap = 512);

}  // namespace osense
