#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

namespace osense {

using Config = std::uint32_t;

// Fixed-magnetization computational basis: all bitmasks with a given popcount,
// in ascending numerical order (bit b = site b, set bit = up spin).
struct SectorBasis {
  int n_sites = 0;
  int n_up = 0;
  std::vector<Config> states;

  std::size_t dim() const { return states.size(); }

  // Ordinal of a configuration; the list is sorted so this is a binary search.
  std::size_t index_of(Config c) const;
};

std::shared_ptr<const SectorBasis> enumerate_sector(int n_sites, int n_up);

struct SectorState {
  std::shared_ptr<const SectorBasis> basis;
  Eigen::VectorXd amps;

  double norm() const { return amps.norm(); }
  void normalize() { amps /= amps.norm(); }
};

enum class OpKind { Z, ZZ, Hop, ZZZ, HopZ };

// One dictionary element. Hop(i,j) is s+_i s-_j + s+_j s-_i (antiparallel
// swap); HopZ(i,j;k) multiplies that by sigma^z_k. Site indices are canonical:
// i<j for the pair, k distinct from both.
struct BasisOperator {
  OpKind kind;
  int i = -1;
  int j = -1;
  int k = -1;

  // Hilbert-Schmidt norm of the unnormalized physical operator on n sites.
  double hs_norm(int n_sites) const;
  bool operator==(const BasisOperator&) const = default;
};

// y = W x with the unnormalized physical operator (sigma^z eigenvalues +-1).
// y is overwritten.
void apply_op(const BasisOperator& op, const SectorBasis& basis,
              const Eigen::VectorXd& x, Eigen::VectorXd& y);

SectorState apply_basis_operator(const BasisOperator& op, const SectorState& s);

}  // namespace osense
