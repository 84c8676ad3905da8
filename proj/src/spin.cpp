#include "osense/spin.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace osense {

std::size_t SectorBasis::index_of(Config c) const {
  auto it = std::lower_bound(states.begin(), states.end(), c);
  if (it == states.end() || *it != c) throw std::out_of_range("configuration not in sector");
  return static_cast<std::size_t>(it - states.begin());
}

std::shared_ptr<const SectorBasis> enumerate_sector(int n_sites, int n_up) {
  if (n_sites < 0 || n_sites > 24 || n_up < 0 || n_up > n_sites)
    throw std::invalid_argument("enumerate_sector: need 0 <= n_up <= n_sites <= 24");
  auto b = std::make_shared<SectorBasis>();
  b->n_sites = n_sites;
  b->n_up = n_up;
  if (n_up == 0) {
    b->states.push_back(0);
    return b;
  }
  // Gosper's hack: next configuration with the same popcount.
  Config v = (Config(1) << n_up) - 1;
  const Config limit = (n_sites == 32) ? ~Config(0) : (Config(1) << n_sites);
  while (v < limit) {
    b->states.push_back(v);
    Config t = v | (v - 1);
    v = (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
    if (v == 0) break;
  }
  return b;
}

double BasisOperator::hs_norm(int n_sites) const {
  switch (kind) {
    case OpKind::Z:
    case OpKind::ZZ:
    case OpKind::ZZZ:
      // Pauli-z strings square to the identity.
      return std::sqrt(std::pow(2.0, n_sites));
    case OpKind::Hop:
    case OpKind::HopZ:
      // Hop^2 projects onto the antiparallel subspace of the pair (half the
      // Hilbert space), so Tr(W^2) = 2^(n-1).
      return std::sqrt(std::pow(2.0, n_sites - 1));
  }
  return 0.0;
}

namespace {
inline double zsign(Config c, int site) { return (c >> site) & 1 ? 1.0 : -1.0; }
}  // namespace

void apply_op(const BasisOperator& op, const SectorBasis& basis,
              const Eigen::VectorXd& x, Eigen::VectorXd& y) {
  const auto dim = static_cast<Eigen::Index>(basis.dim());
  if (x.size() != dim) throw std::invalid_argument("apply_op: state/basis dimension mismatch");
  if (op.i >= basis.n_sites || op.j >= basis.n_sites || op.k >= basis.n_sites)
    throw std::out_of_range("apply_op: site index out of range");
  y.setZero(dim);
  switch (op.kind) {
    case OpKind::Z:
      for (Eigen::Index s = 0; s < dim; ++s) y[s] = zsign(basis.states[s], op.i) * x[s];
      break;
    case OpKind::ZZ:
      for (Eigen::Index s = 0; s < dim; ++s) {
        const Config c = basis.states[s];
        y[s] = zsign(c, op.i) * zsign(c, op.j) * x[s];
      }
      break;
    case OpKind::ZZZ:
      for (Eigen::Index s = 0; s < dim; ++s) {
        const Config c = basis.states[s];
        y[s] = zsign(c, op.i) * zsign(c, op.j) * zsign(c, op.k) * x[s];
      }
      break;
    case OpKind::Hop: {
      const Config mask = (Config(1) << op.i) | (Config(1) << op.j);
      for (Eigen::Index s = 0; s < dim; ++s) {
        const Config c = basis.states[s];
        const Config bits = c & mask;
        if (bits != 0 && bits != mask) y[basis.index_of(c ^ mask)] += x[s];
      }
      break;
    }
    case OpKind::HopZ: {
      // sigma^z_k commutes with the hop on (i,j) since k is a third site.
      const Config mask = (Config(1) << op.i) | (Config(1) << op.j);
      for (Eigen::Index s = 0; s < dim; ++s) {
        const Config c = basis.states[s];
        const Config bits = c & mask;
        if (bits != 0 && bits != mask) y[basis.index_of(c ^ mask)] += zsign(c, op.k) * x[s];
      }
      break;
    }
  }
}

SectorState apply_basis_operator(const BasisOperator& op, const SectorState& s) {
  SectorState out;
  out.basis = s.basis;
  apply_op(op, *s.basis, s.amps, out.amps);
  return out;
}

}  // namespace osense
