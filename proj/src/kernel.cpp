#include "osense/kernel.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace osense {

namespace {
inline int pair_rank(int i, int j, int n) { return i * (2 * n - i - 1) / 2 + (j - i - 1); }
}  // namespace

int OperatorBasis::z_index(int i) const { return i; }

int OperatorBasis::zz_index(int i, int j) const { return n_sites + pair_rank(i, j, n_sites); }

int OperatorBasis::hop_index(int i, int j) const {
  const int n_pairs = n_sites * (n_sites - 1) / 2;
  return n_sites + n_pairs + pair_rank(i, j, n_sites);
}

int OperatorBasis::zzz_index(int i, int j, int k) const {
  const int n = n_sites;
  int r = 0;
  for (int a = 0; a < i; ++a) r += (n - 1 - a) * (n - 2 - a) / 2;
  for (int b = i + 1; b < j; ++b) r += n - 1 - b;
  r += k - j - 1;
  return n + n * (n - 1) + r;
}

int OperatorBasis::hopz_index(int i, int j, int k) const {
  const int n = n_sites;
  const int base = n + n * (n - 1) + n * (n - 1) * (n - 2) / 6;
  const int k_rank = k - (k > i ? 1 : 0) - (k > j ? 1 : 0);
  return base + pair_rank(i, j, n) * (n - 2) + k_rank;
}

OperatorBasis build_operator_basis(int n_sites) {
  if (n_sites < 2 || n_sites > 24)
    throw std::invalid_argument("build_operator_basis: need 2 <= n_sites <= 24");
  OperatorBasis b;
  b.n_sites = n_sites;
  const int n = n_sites;
  b.ops.reserve(n + n * (n - 1) + n * (n - 1) * (n - 2) / 6 + n * (n - 1) / 2 * (n - 2));
  for (int i = 0; i < n; ++i) b.ops.push_back({OpKind::Z, i});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) b.ops.push_back({OpKind::ZZ, i, j});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) b.ops.push_back({OpKind::Hop, i, j});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) b.ops.push_back({OpKind::ZZZ, i, j, k});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (k != i && k != j) b.ops.push_back({OpKind::HopZ, i, j, k});
  return b;
}

SectorState apply_coeff_operator(const CoeffVector& c, const OperatorBasis& basis,
                                 const SectorState& s) {
  if (c.size() != basis.size())
    throw std::invalid_argument("apply_coeff_operator: coefficient length mismatch");
  SectorState out;
  out.basis = s.basis;
  out.amps.setZero(s.amps.size());
  Eigen::VectorXd tmp;
  for (int i = 0; i < basis.size(); ++i) {
    if (c[i] == 0.0) continue;
    apply_op(basis.ops[i], *s.basis, s.amps, tmp);
    out.amps += (c[i] / basis.hs_norm(i)) * tmp;
  }
  return out;
}

CovarianceMatrix covariance_matrix(const SectorState& state, const OperatorBasis& basis,
                                   int state_index) {
  if (std::abs(state.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("covariance_matrix: state must be normalized");
  const int nw = basis.size();
  const Eigen::Index dim = state.amps.size();
  Eigen::MatrixXd phi(nw, dim);
  Eigen::VectorXd tmp;
  for (int i = 0; i < nw; ++i) {
    apply_op(basis.ops[i], *state.basis, state.amps, tmp);
    phi.row(i) = tmp.transpose() / basis.hs_norm(i);
  }
  CovarianceMatrix cov;
  cov.state_index = state_index;
  cov.mean = phi * state.amps;
  cov.m.setZero(nw, nw);
  cov.m.selfadjointView<Eigen::Lower>().rankUpdate(phi);
  cov.m.triangularView<Eigen::StrictlyUpper>() = cov.m.transpose();
  cov.m.noalias() -= cov.mean * cov.mean.transpose();
  return cov;
}

std::vector<CovarianceMatrix> covariance_matrices(const EigenSample& sample,
                                                  const OperatorBasis& basis) {
  std::vector<CovarianceMatrix> out;
  out.reserve(sample.n_states());
  for (int a = 0; a < sample.n_states(); ++a)
    out.push_back(covariance_matrix(sample.state(a), basis, a));
  return out;
}

double variance_of(const CoeffVector& c, const CovarianceMatrix& m) {
  if (c.size() != m.m.rows()) throw std::invalid_argument("variance_of: dimension mismatch");
  return c.dot(m.m * c);
}

KernelBasis joint_kernel(const std::vector<CovarianceMatrix>& mats, double kernel_tol) {
  if (mats.empty()) throw std::invalid_argument("joint_kernel: need at least one matrix");
  Eigen::MatrixXd sum = mats[0].m;
  for (std::size_t a = 1; a < mats.size(); ++a) {
    if (mats[a].m.rows() != sum.rows())
      throw std::invalid_argument("joint_kernel: dimension mismatch");
    sum += mats[a].m;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sum);
  const Eigen::VectorXd& ev = es.eigenvalues();  // ascending
  KernelBasis kb;
  kb.spectrum = ev;
  kb.gap.top = ev[ev.size() - 1];
  const double threshold = kernel_tol * std::max(kb.gap.top, 1e-300);
  int d = 0;
  while (d < ev.size() && ev[d] < threshold) ++d;
  kb.dim = d;
  kb.columns = es.eigenvectors().leftCols(d);
  // Deterministic sign: largest-magnitude entry of each column positive.
  for (int c = 0; c < d; ++c) {
    Eigen::Index at;
    kb.columns.col(c).cwiseAbs().maxCoeff(&at);
    if (kb.columns(at, c) < 0) kb.columns.col(c) = -kb.columns.col(c);
  }
  kb.gap.last_kept = d > 0 ? ev[d - 1] : 0.0;
  kb.gap.first_out = d < ev.size() ? ev[d] : std::numeric_limits<double>::infinity();
  kb.gap.ratio = kb.gap.first_out / std::max(kb.gap.last_kept, 1e-300);
  kb.gap.reliable = kb.gap.ratio >= 1e3;
  return kb;
}

}  // namespace osense
