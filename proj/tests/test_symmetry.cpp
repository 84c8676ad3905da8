#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "helpers.hpp"
#include "osense/eigensolver.hpp"
#include "osense/symmetry.hpp"

using namespace osense;

namespace {

InteractionGraph er(int n, int e, std::uint64_t seed) {
  Rng rng(seed);
  return sample_connected_er(n, e, rng);
}

Eigen::MatrixXd dense_of(const SymmetryClassOperator& op, const OperatorBasis& dict,
                         const SectorBasis& sector) {
  return oracle::coeff_operator_matrix(op.coeffs, dict, sector);
}

}  // namespace

TEST_CASE("intrinsic set: counts and unit normalization") {
  const auto dict = build_operator_basis(6);
  const auto ops = build_intrinsic_set(dict);
  // 1 + n + C(n,2) + C(n,2) + 1
  CHECK(ops.size() == std::size_t(1 + 6 + 15 + 15 + 1));
  int a = 0, b = 0, c = 0, d = 0, e = 0;
  for (const auto& op : ops) {
    CHECK(op.coeffs.norm() == doctest::Approx(1.0).epsilon(1e-12));
    switch (op.class_label) {
      case SymClass::A: ++a; break;
      case SymClass::B: ++b; break;
      case SymClass::C: ++c; break;
      case SymClass::D: ++d; break;
      case SymClass::E: ++e; break;
      default: CHECK(false);
    }
  }
  CHECK(a == 1);
  CHECK(b == 6);
  CHECK(c == 15);
  CHECK(d == 15);
  CHECK(e == 1);
}

TEST_CASE("intrinsic operators reduce to scalars or conserved ops on Sz=0") {
  const int n = 6;
  const auto dict = build_operator_basis(n);
  const auto sector = enumerate_sector(n, 3);
  auto g = er(n, 8, 3);
  g.couplings = {1, -1, 1, 1, -1, 1, 1, 1};  // arbitrary signs: identities still hold
  const auto h = build_hamiltonian(g, 3);
  REQUIRE(h.dense.has_value());
  const Eigen::Index d = h.dense->rows();
  for (const auto& op : build_intrinsic_set(dict)) {
    const Eigen::MatrixXd o = dense_of(op, dict, *sector);
    switch (op.class_label) {
      case SymClass::A:
      case SymClass::C:
      case SymClass::D:
        // Annihilate the zero-magnetization sector entirely.
        CHECK(o.norm() < 1e-12);
        break;
      case SymClass::B:
        // Act as a strictly negative multiple of the identity.
        CHECK((o - o(0, 0) * Eigen::MatrixXd::Identity(d, d)).norm() < 1e-12);
        CHECK(o(0, 0) < 0.0);
        break;
      case SymClass::E:
        // Total-spin Casimir up to scalars: commutes with any Heisenberg H.
        CHECK((o * *h.dense - *h.dense * o).norm() < 1e-10);
        CHECK(o.norm() > 1e-3);  // genuinely nontrivial action
        break;
      default: CHECK(false);
    }
  }
}

TEST_CASE("zero-variance identities on sampled eigenstates") {
  const int n = 6;
  const auto g = er(n, 9, 11);
  const auto h = build_hamiltonian(g, 3);
  const auto sample = lowest_eigenstates(h, 5);
  const auto dict = build_operator_basis(n);
  const auto mats = covariance_matrices(sample, dict);

  std::vector<SymmetryClassOperator> ops = build_intrinsic_set(dict);
  ops.push_back(hamiltonian_operator(dict, g));
  const auto rep = verify_zero_variance(ops, sample, mats);
  CHECK(rep.all_consistent);
  for (const auto& chk : rep.checks) {
    CHECK(chk.expected_zero);
    CHECK(chk.passed);
    CHECK(chk.max_variance <= 1e-10);
  }

  // Independent oracle for a few of them: dense variance on the dense states.
  for (const auto& op : {ops.front(), ops.back()}) {
    const Eigen::MatrixXd o = dense_of(op, dict, *sample.basis);
    for (int a = 0; a < sample.n_states(); ++a) {
      const Eigen::VectorXd v = sample.states.col(a);
      const double mean = v.dot(o * v);
      CHECK((o * v).squaredNorm() - mean * mean < 1e-12);
    }
  }
}

TEST_CASE("Hamiltonian operator reproduces the sector matrix up to scale") {
  const auto g = er(5, 6, 2);
  const auto dict = build_operator_basis(5);
  const auto sector = enumerate_sector(5, 2);
  const auto hop = hamiltonian_operator(dict, g);
  CHECK(hop.class_label == SymClass::Hamiltonian);
  const Eigen::MatrixXd o = dense_of(hop, dict, *sector);
  const auto h = build_hamiltonian(g, 2);
  REQUIRE(h.dense.has_value());
  // Proportional: o = h / ||H||_phys-coefficient-norm.
  const double scale = h.dense->cwiseAbs().maxCoeff() / o.cwiseAbs().maxCoeff();
  CHECK((*h.dense - scale * o).norm() < 1e-9 * scale);
}

TEST_CASE("geometric classes on a swap-symmetric graph") {
  // Bowtie-like graph with an exchangeable pair (1,2): both connect only to 0.
  InteractionGraph g;
  g.n_vertices = 6;
  g.edges = {{0, 1}, {0, 2}, {0, 3}, {3, 4}, {4, 5}};
  g.couplings = {1, 1, 1, 1, 1};
  const auto pairs = find_swap_automorphisms(g);
  REQUIRE(std::find(pairs.begin(), pairs.end(), std::make_pair(1, 2)) != pairs.end());

  const auto dict = build_operator_basis(6);
  const auto geo = build_geometric_set(dict, g, {{1, 2}});
  // F + (n-2) G operators.
  CHECK(geo.size() == std::size_t(1 + 4));

  const auto h = build_hamiltonian(g, 3);
  const auto sample = lowest_eigenstates(h, 5);
  const auto mats = covariance_matrices(sample, dict);

  // F commutes with H (oracle check) and has zero variance on the sample.
  const Eigen::MatrixXd f = dense_of(geo.front(), dict, *sample.basis);
  CHECK((f * *h.dense - *h.dense * f).norm() < 1e-10);
  const auto rep = verify_zero_variance(geo, sample, mats);
  for (const auto& chk : rep.checks) {
    if (chk.class_label == SymClass::F) {
      CHECK(chk.expected_zero);
      CHECK(chk.passed);
    }
    if (chk.class_label == SymClass::G && chk.expected_zero) CHECK(chk.passed);
  }
  CHECK(rep.all_consistent);

  // A non-automorphism pair is rejected.
  CHECK_THROWS(build_geometric_set(dict, g, {{0, 1}}));
}
