#include "osense/eigensolver.hpp"

#include <Eigen/Dense>
#include <stdexcept>

#include "osense/rng.hpp"

namespace osense {

void SectorHamiltonian::matvec(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  y = diag.cwiseProduct(x);
  for (const auto& h : hops) {
    y[h.row] += h.val * x[h.col];
    y[h.col] += h.val * x[h.row];
  }
}

Eigen::MatrixXd SectorHamiltonian::matmat(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd y(x.rows(), x.cols());
  Eigen::VectorXd tmp;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    matvec(x.col(c), tmp);
    y.col(c) = tmp;
  }
  return y;
}

SectorHamiltonian build_hamiltonian(const InteractionGraph& g, int n_up) {
  if (!is_connected(g)) throw std::invalid_argument("build_hamiltonian: graph must be connected");
  SectorHamiltonian h;
  h.graph = g;
  h.basis = enumerate_sector(g.n_vertices, n_up);
  const auto dim = static_cast<Eigen::Index>(h.basis->dim());
  h.diag.setZero(dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    const Config c = h.basis->states[s];
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      const auto [i, j] = g.edges[e];
      const double zi = (c >> i) & 1 ? 1.0 : -1.0;
      const double zj = (c >> j) & 1 ? 1.0 : -1.0;
      h.diag[s] += g.couplings[e] * zi * zj;
      const Config mask = (Config(1) << i) | (Config(1) << j);
      const Config bits = c & mask;
      if (bits != 0 && bits != mask) {
        const auto t = static_cast<Eigen::Index>(h.basis->index_of(c ^ mask));
        if (t > s)
          h.hops.push_back({static_cast<std::int32_t>(s), static_cast<std::int32_t>(t),
                            2.0 * g.couplings[e]});
      }
    }
  }
  if (dim <= kDenseDimLimit) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    m.diagonal() = h.diag;
    for (const auto& e : h.hops) {
      m(e.row, e.col) += e.val;
      m(e.col, e.row) += e.val;
    }
    h.dense = std::move(m);
  }
  return h;
}

namespace {

// Number of states to return: at least n_requested, extended through any
// degenerate multiplet straddling the cut.
int extended_count(const Eigen::VectorXd& energies, int n_requested, double tol) {
  int n = std::min<int>(n_requested, static_cast<int>(energies.size()));
  while (n < energies.size() &&
         energies[n] - energies[n - 1] <= tol * std::max(1.0, std::abs(energies[n - 1])))
    ++n;
  return n;
}

Eigen::MatrixXd random_block(Eigen::Index dim, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(dim, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < dim; ++r) m(r, c) = rng.normal();
  return m;
}

// Thin QR, in place; returns the retained column count (rank at tol).
Eigen::Index orthonormalize(Eigen::MatrixXd& w, double tol = 1e-12) {
  Eigen::Index kept = 0;
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    Eigen::VectorXd v = w.col(c);
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index p = 0; p < kept; ++p) v -= w.col(p).dot(v) * w.col(p);
    const double n = v.norm();
    if (n > tol) {
      w.col(kept) = v / n;
      ++kept;
    }
  }
  return kept;
}

EigenSample lowest_dense(const SectorHamiltonian& h, int n_requested, double degeneracy_tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(*h.dense);
  const int n = extended_count(es.eigenvalues(), n_requested, degeneracy_tol);
  EigenSample out;
  out.basis = h.basis;
  out.energies = es.eigenvalues().head(n);
  out.states = es.eigenvectors().leftCols(n);
  out.degeneracy_extended = n > n_requested;
  return out;
}

EigenSample lowest_krylov(const SectorHamiltonian& h, int n_requested, double degeneracy_tol,
                          std::uint64_t start_seed) {
  const Eigen::Index dim = h.dim();
  const Eigen::Index block = std::min<Eigen::Index>(dim, n_requested + 4);
  const Eigen::Index max_sub = std::min<Eigen::Index>(dim, std::max<Eigen::Index>(8 * block, 160));
  constexpr double resid_tol = 1e-10;
  constexpr int max_restarts = 200;

  Rng rng(start_seed);
  Eigen::MatrixXd q = random_block(dim, block, rng);
  orthonormalize(q);

  Eigen::Index last = block;  // width of the most recent block
  for (int restart = 0; restart < max_restarts; ++restart) {
    // Expand the block Krylov subspace with full reorthogonalization.
    while (q.cols() < max_sub) {
      Eigen::MatrixXd w = h.matmat(q.rightCols(last));
      for (int pass = 0; pass < 2; ++pass) w -= q * (q.transpose() * w);
      Eigen::Index kept = orthonormalize(w);
      if (kept == 0) {
        // Invariant subspace hit; pad with fresh random directions.
        w = random_block(dim, block, rng);
        for (int pass = 0; pass < 2; ++pass) w -= q * (q.transpose() * w);
        kept = orthonormalize(w);
        if (kept == 0) break;
      }
      Eigen::MatrixXd grown(dim, q.cols() + kept);
      grown << q, w.leftCols(kept);
      q = std::move(grown);
      last = kept;
    }

    // Rayleigh-Ritz on the accumulated subspace.
    Eigen::MatrixXd hq = h.matmat(q);
    Eigen::MatrixXd t = q.transpose() * hq;
    t = 0.5 * (t + t.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Eigen::MatrixXd ritz = q * es.eigenvectors();
    const Eigen::MatrixXd hritz = hq * es.eigenvectors();

    const int n = extended_count(es.eigenvalues(), n_requested, degeneracy_tol);
    const int need = std::min<int>(n + 1, static_cast<int>(es.eigenvalues().size()));
    bool converged = static_cast<Eigen::Index>(need) <= q.cols();
    for (int a = 0; a < need && converged; ++a) {
      const double resid = (hritz.col(a) - es.eigenvalues()[a] * ritz.col(a)).norm();
      if (resid > resid_tol) converged = false;
    }
    if (converged || q.cols() >= dim) {
      EigenSample out;
      out.basis = h.basis;
      out.energies = es.eigenvalues().head(n);
      out.states = ritz.leftCols(n);
      out.degeneracy_extended = n > n_requested;
      return out;
    }
    // Thick restart from the lowest Ritz vectors.
    q = ritz.leftCols(std::min<Eigen::Index>(2 * block, q.cols()));
    orthonormalize(q);
    last = std::min<Eigen::Index>(block, q.cols());
  }
  throw std::runtime_error("lowest_eigenstates: Krylov iteration cap exceeded");
}

}  // namespace

EigenSample lowest_eigenstates(const SectorHamiltonian& h, int n_requested, double degeneracy_tol,
                               std::uint64_t start_seed) {
  if (n_requested < 1 || n_requested > h.dim())
    throw std::invalid_argument("lowest_eigenstates: bad n_requested");
  if (h.dense) return lowest_dense(h, n_requested, degeneracy_tol);
  return lowest_krylov(h, n_requested, degeneracy_tol, start_seed);
}

}  // namespace osense
