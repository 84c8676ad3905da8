#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "helpers.hpp"
#include "osense/eigensolver.hpp"
#include "osense/kernel.hpp"

using namespace osense;

TEST_CASE("dictionary size and block order") {
  auto count = [](int n) {
    return n + 2 * oracle::binom(n, 2) + oracle::binom(n, 3) + oracle::binom(n, 2) * (n - 2);
  };
  CHECK(build_operator_basis(2).size() == 4);
  CHECK(build_operator_basis(4).size() == 32);
  CHECK(build_operator_basis(12).size() == 1024);
  CHECK(build_operator_basis(14).size() == 1652);
  CHECK(build_operator_basis(16).size() == 2496);
  for (int n : {4, 7}) CHECK(build_operator_basis(n).size() == count(n));

  const auto b = build_operator_basis(5);
  // Blocks in declared order, lexicographic within each.
  int at = 0;
  for (int i = 0; i < 5; ++i) CHECK(b.ops[at++] == BasisOperator{OpKind::Z, i, -1, -1});
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) CHECK(b.ops[at++] == BasisOperator{OpKind::ZZ, i, j, -1});
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) CHECK(b.ops[at++] == BasisOperator{OpKind::Hop, i, j, -1});
  CHECK(b.ops[at] == BasisOperator{OpKind::ZZZ, 0, 1, 2});

  // Index functions are inverse to the layout.
  for (int idx = 0; idx < b.size(); ++idx) {
    const auto& op = b.ops[idx];
    switch (op.kind) {
      case OpKind::Z: CHECK(b.z_index(op.i) == idx); break;
      case OpKind::ZZ: CHECK(b.zz_index(op.i, op.j) == idx); break;
      case OpKind::Hop: CHECK(b.hop_index(op.i, op.j) == idx); break;
      case OpKind::ZZZ: CHECK(b.zzz_index(op.i, op.j, op.k) == idx); break;
      case OpKind::HopZ: CHECK(b.hopz_index(op.i, op.j, op.k) == idx); break;
    }
  }
}

TEST_CASE("covariance matrix against the Kronecker oracle") {
  const int n = 4;
  const auto dict = build_operator_basis(n);
  const auto sector = enumerate_sector(n, 2);
  Rng rng(9);
  SectorState psi{sector, Eigen::VectorXd(sector->dim())};
  for (Eigen::Index i = 0; i < psi.amps.size(); ++i) psi.amps[i] = rng.normal();
  psi.normalize();

  const auto cov = covariance_matrix(psi, dict, 0);
  REQUIRE(cov.m.rows() == dict.size());

  // Oracle: normalized sector matrices, then M_ij = <ij> - <i><j>.
  std::vector<Eigen::MatrixXd> w(dict.size());
  Eigen::VectorXd mean(dict.size());
  for (int i = 0; i < dict.size(); ++i) {
    const auto full = oracle::full_operator(dict.ops[i], n);
    w[i] = oracle::to_sector(full, *sector) / oracle::hs_norm(full);
    mean[i] = psi.amps.dot(w[i] * psi.amps);
  }
  CHECK((cov.mean - mean).norm() < 1e-12);
  for (int i = 0; i < dict.size(); ++i)
    for (int j = 0; j < dict.size(); ++j) {
      const double ref = (w[i] * psi.amps).dot(w[j] * psi.amps) - mean[i] * mean[j];
      CHECK(std::abs(cov.m(i, j) - ref) < 1e-12);
    }

  // PSD: variance of random coefficient vectors is nonnegative and matches
  // the quadratic form.
  for (int t = 0; t < 5; ++t) {
    CoeffVector c(dict.size());
    for (int i = 0; i < c.size(); ++i) c[i] = rng.normal();
    const double v = variance_of(c, cov);
    CHECK(v >= -1e-12);
    Eigen::MatrixXd o = Eigen::MatrixXd::Zero(sector->dim(), sector->dim());
    for (int i = 0; i < dict.size(); ++i) o += c[i] * w[i];
    const double m1 = psi.amps.dot(o * psi.amps);
    const double ref = (o * psi.amps).squaredNorm() - m1 * m1;
    CHECK(v == doctest::Approx(ref).epsilon(1e-9));
  }

  SectorState unnorm = psi;
  unnorm.amps *= 2.0;
  CHECK_THROWS(covariance_matrix(unnorm, dict, 0));
}

TEST_CASE("eigenstates have zero variance for the Hamiltonian coefficients") {
  Rng rng(4);
  auto g = sample_connected_er(6, 8, rng);
  const auto h = build_hamiltonian(g, 3);
  const auto sample = lowest_eigenstates(h, 5);
  const auto dict = build_operator_basis(6);
  const auto mats = covariance_matrices(sample, dict);
  REQUIRE(static_cast<int>(mats.size()) == sample.n_states());

  // H in unit-HS-norm coordinates.
  CoeffVector c = CoeffVector::Zero(dict.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto [i, j] = g.edges[e];
    c[dict.zz_index(i, j)] = g.couplings[e] * dict.hs_norm(dict.zz_index(i, j));
    c[dict.hop_index(i, j)] = 2.0 * g.couplings[e] * dict.hs_norm(dict.hop_index(i, j));
  }
  c.normalize();
  for (const auto& m : mats) CHECK(variance_of(c, m) < 1e-14);
  // A generic vector does not.
  CoeffVector r(dict.size());
  for (int i = 0; i < r.size(); ++i) r[i] = rng.normal();
  r.normalize();
  CHECK(variance_of(r, mats[0]) > 1e-6);
}

TEST_CASE("joint kernel equals the oracle null space of the covariance sum") {
  Rng rng(12);
  auto g = sample_connected_er(6, 9, rng);
  const auto h = build_hamiltonian(g, 3);
  const auto sample = lowest_eigenstates(h, 5);
  const auto dict = build_operator_basis(6);
  const auto mats = covariance_matrices(sample, dict);
  const auto kernel = joint_kernel(mats, 1e-10);

  REQUIRE(kernel.dim > 0);
  REQUIRE(kernel.columns.cols() == kernel.dim);
  // Orthonormal columns.
  CHECK((kernel.columns.transpose() * kernel.columns -
         Eigen::MatrixXd::Identity(kernel.dim, kernel.dim))
            .norm() < 1e-10);
  // Every column annihilates the variance on every sampled state.
  for (int j = 0; j < kernel.dim; ++j)
    for (const auto& m : mats) CHECK(variance_of(kernel.columns.col(j), m) < 1e-10);

  // Oracle: eigendecomposition of the explicit sum.
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(dict.size(), dict.size());
  for (const auto& m : mats) sum += m.m;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sum);
  const double thresh = 1e-10 * es.eigenvalues().maxCoeff();
  int null_dim = 0;
  while (null_dim < es.eigenvalues().size() && es.eigenvalues()[null_dim] <= thresh) ++null_dim;
  CHECK(kernel.dim == null_dim);
  const Eigen::MatrixXd p_lib = kernel.columns * kernel.columns.transpose();
  const Eigen::MatrixXd ora = es.eigenvectors().leftCols(null_dim);
  CHECK((p_lib - ora * ora.transpose()).norm() < 1e-8);

  // Gap report consistency.
  CHECK(kernel.gap.top == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-9));
  CHECK(kernel.gap.first_out > kernel.gap.last_kept);
  CHECK(kernel.spectrum.size() == dict.size());
}
