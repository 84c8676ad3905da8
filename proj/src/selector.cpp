#include "osense/selector.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace osense {

EntropyReport spectral_entropy(const CoeffVector& c, const std::vector<CovarianceMatrix>& mats,
                               double cluster_tol, double kernel_tol) {
  EntropyReport rep;
  for (const auto& m : mats) {
    const double scale = std::max(1.0, m.m.diagonal().maxCoeff());
    if (variance_of(c, m) > 1e3 * kernel_tol * scale)
      throw std::invalid_argument("spectral_entropy: coefficient vector is not a kernel element");
    rep.eigenvalues.push_back(c.dot(m.mean));
  }
  std::vector<double> sorted = rep.eigenvalues;
  std::sort(sorted.begin(), sorted.end());
  double max_abs = 0.0;
  for (double v : sorted) max_abs = std::max(max_abs, std::abs(v));
  const double tol = cluster_tol * std::max(1.0, max_abs);

  double acc = sorted.empty() ? 0.0 : sorted[0];
  int count = sorted.empty() ? 0 : 1;
  auto flush = [&] { rep.clusters.push_back({acc / count, count}); };
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] - sorted[i - 1] > tol) {
      flush();
      acc = 0.0;
      count = 0;
    }
    acc += sorted[i];
    ++count;
  }
  if (count > 0) flush();

  const double total = static_cast<double>(sorted.size());
  rep.entropy = 0.0;
  for (const auto& cl : rep.clusters) {
    const double p = cl.multiplicity / total;
    rep.entropy -= p * std::log(p);
  }
  return rep;
}

Selection select_hamiltonian(const SparseBasis& k, const std::vector<CovarianceMatrix>& mats,
                             double cluster_tol, double kernel_tol) {
  if (k.columns.cols() == 0) throw std::invalid_argument("select_hamiltonian: empty basis");
  Selection sel;
  double best_entropy = -1.0;
  double best_l1 = 0.0;
  for (Eigen::Index j = 0; j < k.columns.cols(); ++j) {
    EntropyReport rep = spectral_entropy(k.columns.col(j), mats, cluster_tol, kernel_tol);
    rep.column_index = static_cast<int>(j);
    const bool better = rep.entropy > best_entropy + 1e-9 ||
                        (std::abs(rep.entropy - best_entropy) <= 1e-9 && k.l1_norms[j] < best_l1);
    if (better) {
      best_entropy = rep.entropy;
      best_l1 = k.l1_norms[j];
      sel.column = static_cast<int>(j);
      sel.report = std::move(rep);
    }
  }
  sel.low_confidence = best_entropy <= 1e-12;
  return sel;
}

RecoveredGeometry read_geometry(const CoeffVector& c, const OperatorBasis& basis, double geo_eps) {
  RecoveredGeometry geo;
  const int n = basis.n_sites;
  double max_score = 0.0;
  std::vector<std::pair<std::pair<int, int>, double>> scores;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double s =
          std::max(std::abs(c[basis.zz_index(i, j)]), std::abs(c[basis.hop_index(i, j)]));
      scores.push_back({{i, j}, s});
      max_score = std::max(max_score, s);
    }
  if (max_score == 0.0) {
    geo.empty_flagged = true;
    return geo;
  }
  for (const auto& [e, s] : scores)
    if (s >= geo_eps * max_score) {
      geo.edges.push_back(e);
      geo.edge_scores.push_back(s);
    }
  return geo;
}

SuccessResult evaluate_success(const RecoveredGeometry& candidate, const EntropyReport& cand_entropy,
                               double truth_entropy, const InteractionGraph& truth,
                               const std::vector<std::pair<int, int>>& kernel_f_pairs) {
  SuccessResult res;
  if (cand_entropy.entropy < truth_entropy - 1e-9) {
    res.reason = "entropy below truth";
    return res;
  }
  const std::set<std::pair<int, int>> cand(candidate.edges.begin(), candidate.edges.end());
  const std::set<std::pair<int, int>> want(truth.edges.begin(), truth.edges.end());
  const std::set<std::pair<int, int>> allowed(kernel_f_pairs.begin(), kernel_f_pairs.end());
  std::vector<std::pair<int, int>> diff;
  std::set_symmetric_difference(cand.begin(), cand.end(), want.begin(), want.end(),
                                std::back_inserter(diff));
  for (const auto& e : diff)
    if (!allowed.count(e)) {
      res.reason = "geometry mismatch";
      return res;
    }
  res.success = true;
  res.reason = diff.empty() ? "exact" : "F-shift equivalent";
  return res;
}

double DualityCrossover::xi_h(double ne) const { return 3.0 * ne / std::sqrt(5.0 * ne); }

double DualityCrossover::xi_dual(double ne) const {
  return (2.0 * pairs + ne) / std::sqrt(4.0 * pairs + 5.0 * ne);
}

DualityCrossover duality_crossover(int n_vertices) {
  if (n_vertices < 3) throw std::invalid_argument("duality_crossover: need n_vertices >= 3");
  DualityCrossover dc;
  dc.pairs = n_vertices * (n_vertices - 1) / 2.0;
  auto f = [&](double ne) { return dc.xi_h(ne) - dc.xi_dual(ne); };
  double lo = 1.0, hi = dc.pairs;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  dc.critical_ne = 0.5 * (lo + hi);
  dc.critical_fraction = dc.critical_ne / dc.pairs;
  return dc;
}

}  // namespace osense
