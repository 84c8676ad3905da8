#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "osense/eigensolver.hpp"
#include "osense/selector.hpp"
#include "osense/symmetry.hpp"

using namespace osense;

namespace {

// Synthetic sample: zero covariance matrices (every vector is a kernel
// element) with prescribed per-state means, so expectation values are fully
// controlled.
std::vector<CovarianceMatrix> fake_sample(const std::vector<Eigen::VectorXd>& means) {
  std::vector<CovarianceMatrix> mats;
  for (std::size_t a = 0; a < means.size(); ++a) {
    CovarianceMatrix m;
    m.m = Eigen::MatrixXd::Zero(means[a].size(), means[a].size());
    m.mean = means[a];
    m.state_index = static_cast<int>(a);
    mats.push_back(std::move(m));
  }
  return mats;
}

std::vector<CovarianceMatrix> from_values(const std::vector<double>& lambda) {
  std::vector<Eigen::VectorXd> means;
  for (double v : lambda) {
    Eigen::VectorXd m(2);
    m << v, 1.0;
    means.push_back(m);
  }
  return fake_sample(means);
}

CoeffVector e0() {
  CoeffVector c(2);
  c << 1.0, 0.0;
  return c;
}

}  // namespace

TEST_CASE("entropy of pinned multiplicity patterns") {
  // Two clusters with multiplicities {2,3}.
  auto rep = spectral_entropy(e0(), from_values({1, 1, -3, -3, -3}));
  CHECK(rep.entropy == doctest::Approx(0.6730).epsilon(2e-4));
  REQUIRE(rep.clusters.size() == 2);
  CHECK(rep.clusters[0].multiplicity == 3);
  CHECK(rep.clusters[1].multiplicity == 2);

  // Five distinct values.
  rep = spectral_entropy(e0(), from_values({0.1, 0.5, 1.2, -0.3, 2.0}));
  CHECK(rep.entropy == doctest::Approx(std::log(5.0)).epsilon(1e-10));
  CHECK(rep.entropy == doctest::Approx(1.6094).epsilon(2e-4));

  // All equal.
  rep = spectral_entropy(e0(), from_values({0.7, 0.7, 0.7, 0.7, 0.7}));
  CHECK(rep.entropy == 0.0);
  CHECK(rep.clusters.size() == 1);

  // Near-equal values inside the cluster tolerance merge.
  rep = spectral_entropy(e0(), from_values({1.0, 1.0 + 1e-9, -1.0, -1.0, -1.0}));
  CHECK(rep.clusters.size() == 2);
}

TEST_CASE("entropy guard rejects non-kernel vectors") {
  auto mats = from_values({1, 2, 3, 4, 5});
  mats[0].m(0, 0) = 1.0;  // genuine variance along e0
  CHECK_THROWS_AS(spectral_entropy(e0(), mats), std::invalid_argument);
}

TEST_CASE("selection maximizes entropy with l1 tie-breaks") {
  // Three candidate columns: distinct-spectrum (ln 5), two-cluster, constant.
  std::vector<Eigen::VectorXd> means;
  const double l5[] = {0.1, 0.9, -0.4, 1.7, 0.6};
  const double tc[] = {1, 1, -3, -3, -3};
  for (int a = 0; a < 5; ++a) {
    Eigen::VectorXd m(3);
    m << l5[a], tc[a], 2.0;
    means.push_back(m);
  }
  SparseBasis k;
  k.columns = Eigen::MatrixXd::Identity(3, 3);
  k.l1_norms.resize(3);
  k.l1_norms << 1.0, 1.0, 1.0;
  k.supports.resize(3);
  auto sel = select_hamiltonian(k, fake_sample(means));
  CHECK(sel.column == 0);
  CHECK_FALSE(sel.low_confidence);

  // Tie: two max-entropy columns; the sparser one (smaller l1) wins.
  SparseBasis k2;
  k2.columns.resize(3, 2);
  k2.columns << 1, 0.8, 0, 0.6, 0, 0;
  k2.l1_norms.resize(2);
  k2.l1_norms << 1.0, 1.4;
  k2.supports.resize(2);
  std::vector<Eigen::VectorXd> means2;
  for (int a = 0; a < 5; ++a) {
    Eigen::VectorXd m(3);
    m << l5[a], l5[a], 0.0;  // both columns see 5 distinct values
    means2.push_back(m);
  }
  auto sel2 = select_hamiltonian(k2, fake_sample(means2));
  CHECK(sel2.column == 0);

  // All-zero-entropy basis: flagged low confidence, sparsest column returned.
  std::vector<Eigen::VectorXd> means3(5, (Eigen::VectorXd(3) << 1, 1, 1).finished());
  auto sel3 = select_hamiltonian(k2, fake_sample(means3));
  CHECK(sel3.low_confidence);
  CHECK(sel3.column == 0);

  SparseBasis empty;
  empty.columns.resize(3, 0);
  CHECK_THROWS(select_hamiltonian(empty, fake_sample(means)));
}

TEST_CASE("geometry readout from Hamiltonian supports") {
  Rng rng(6);
  auto g = sample_connected_er(7, 10, rng);
  const auto basis = build_operator_basis(7);
  const auto truth = hamiltonian_operator(basis, g);

  const auto geo = read_geometry(truth.coeffs, basis, 0.05);
  CHECK(geo.edges == g.edges);
  CHECK_FALSE(geo.empty_flagged);
  // Heisenberg pattern: |c_ZZ| : |c_Hop| ratio constant across edges.
  double ratio0 = -1;
  for (auto [i, j] : g.edges) {
    const double r = std::abs(truth.coeffs[basis.zz_index(i, j)]) /
                     std::abs(truth.coeffs[basis.hop_index(i, j)]);
    if (ratio0 < 0) ratio0 = r;
    CHECK(r == doctest::Approx(ratio0).epsilon(1e-6));
  }

  // Cancelling one bond by an F shift removes exactly that edge.
  InteractionGraph star;
  star.n_vertices = 4;
  star.edges = {{0, 1}, {0, 2}, {0, 3}};
  star.couplings = {1, 1, 1};
  const auto b4 = build_operator_basis(4);
  const auto h4 = hamiltonian_operator(b4, star);
  const auto fset = build_geometric_set(b4, star, {{1, 2}});
  REQUIRE_FALSE(fset.empty());
  // alpha chosen so the (0,1)? no: F_{12} lives on bond (1,2), not in H.
  // Instead cancel via scaled F on a bond of a triangle graph.
  InteractionGraph tri;
  tri.n_vertices = 3;
  tri.edges = {{0, 1}, {0, 2}, {1, 2}};
  tri.couplings = {1, 1, 1};
  const auto b3 = build_operator_basis(3);
  const auto h3 = hamiltonian_operator(b3, tri);
  const auto f3 = build_geometric_set(b3, tri, {{1, 2}});
  REQUIRE_FALSE(f3.empty());
  const auto& f12 = f3.front();
  // Scale F so the (1,2) ZZ entry cancels exactly.
  const double alpha =
      h3.coeffs[b3.zz_index(1, 2)] / f12.coeffs[b3.zz_index(1, 2)];
  CoeffVector shifted = h3.coeffs - alpha * f12.coeffs;
  const auto geo3 = read_geometry(shifted, b3, 0.05);
  CHECK(geo3.edges == std::vector<std::pair<int, int>>{{0, 1}, {0, 2}});

  // No two-body support.
  CoeffVector zero = CoeffVector::Zero(b3.size());
  zero[b3.z_index(0)] = 1.0;
  CHECK(read_geometry(zero, b3, 0.05).empty_flagged);
}

TEST_CASE("success evaluation clauses") {
  InteractionGraph g;
  g.n_vertices = 4;
  g.edges = {{0, 1}, {1, 2}, {2, 3}};
  g.couplings = {1, 1, 1};
  EntropyReport high;
  high.entropy = 1.6;
  EntropyReport low;
  low.entropy = 0.5;

  RecoveredGeometry exact;
  exact.edges = g.edges;
  CHECK(evaluate_success(exact, high, 1.6, g, {}).success);
  CHECK(evaluate_success(exact, high, 1.6, g, {}).reason == "exact");
  CHECK_FALSE(evaluate_success(exact, low, 1.6, g, {}).success);
  CHECK(evaluate_success(exact, low, 1.6, g, {}).reason == "entropy below truth");

  RecoveredGeometry missing;
  missing.edges = {{0, 1}, {2, 3}};  // dropped (1,2)
  CHECK_FALSE(evaluate_success(missing, high, 1.6, g, {}).success);
  CHECK(evaluate_success(missing, high, 1.6, g, {{1, 2}}).success);
  CHECK(evaluate_success(missing, high, 1.6, g, {{1, 2}}).reason == "F-shift equivalent");

  RecoveredGeometry extra;
  extra.edges = {{0, 1}, {0, 3}, {1, 2}, {2, 3}};
  CHECK_FALSE(evaluate_success(extra, high, 1.6, g, {{1, 2}}).success);
  CHECK(evaluate_success(extra, high, 1.6, g, {{0, 3}}).success);
}

TEST_CASE("duality crossover formulas") {
  const auto dc = duality_crossover(14);
  CHECK(dc.pairs == 91.0);
  CHECK(dc.critical_ne > 48.2);
  CHECK(dc.critical_ne < 49.2);
  CHECK(dc.critical_fraction == doctest::Approx(dc.critical_ne / 91.0));
  // Sparse regime: physical description cheaper.
  CHECK(dc.xi_h(17) < dc.xi_dual(17));
  // Monotone growth of xi_h.
  for (int ne = 2; ne <= 91; ++ne) CHECK(dc.xi_h(ne) > dc.xi_h(ne - 1));
  // At the critical point the two costs coincide.
  CHECK(dc.xi_h(dc.critical_ne) == doctest::Approx(dc.xi_dual(dc.critical_ne)).epsilon(1e-9));
  CHECK_THROWS(duality_crossover(2));
}
