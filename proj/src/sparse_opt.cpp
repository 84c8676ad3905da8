#include "osense/sparse_opt.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "osense/rng.hpp"

namespace osense {

namespace {

Eigen::MatrixXd random_orthogonal(Eigen::Index d, Rng& rng) {
  Eigen::MatrixXd g(d, d);
  for (Eigen::Index c = 0; c < d; ++c)
    for (Eigen::Index r = 0; r < d; ++r) g(r, c) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  // Fix the sign ambiguity of QR for determinism.
  Eigen::MatrixXd r = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < d; ++c)
    if (r(c, c) < 0) q.col(c) = -q.col(c);
  return q;
}

double l1_sum(const Eigen::MatrixXd& y) { return y.cwiseAbs().sum(); }

Eigen::MatrixXd stage1_single(const Eigen::MatrixXd& k0, const Stage1Options& opts, Rng& rng,
                              StageReport* report) {
  const Eigen::Index d = k0.cols();
  Eigen::MatrixXd a = random_orthogonal(d, rng);
  Eigen::MatrixXd y, g;
  bool converged = false;
  int iters = 0;
  for (; iters < opts.max_iters; ++iters) {
    y.noalias() = k0 * a;
    if (report) report->stage1_objective.push_back(y.array().abs().pow(3).sum());
    g.noalias() = k0.transpose() * (y.cwiseProduct(y.cwiseAbs()));
    Eigen::BDCSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::MatrixXd a_next = svd.matrixU() * svd.matrixV().transpose();
    const double delta = (a_next - a).norm();
    a = std::move(a_next);
    if (delta < opts.conv_tol) {
      converged = true;
      ++iters;
      break;
    }
  }
  if (report) {
    y.noalias() = k0 * a;
    report->stage1_objective.push_back(y.array().abs().pow(3).sum());
    report->stage1_iters = iters;
    report->stage1_converged = converged;
  }
  return a;
}

}  // namespace

Eigen::MatrixXd stage1_l3_rotate(const Eigen::MatrixXd& k0, const Stage1Options& opts,
                                 std::uint64_t seed, StageReport* report) {
  Eigen::MatrixXd best;
  double best_l1 = std::numeric_limits<double>::infinity();
  StageReport best_report;
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    Rng rng = Rng::derive(seed, {static_cast<std::uint64_t>(r)});
    StageReport local;
    Eigen::MatrixXd a = stage1_single(k0, opts, rng, &local);
    const double l1 = l1_sum(k0 * a);
    if (l1 < best_l1) {
      best_l1 = l1;
      best = std::move(a);
      best_report = std::move(local);
    }
  }
  if (report) {
    report->stage1_objective = std::move(best_report.stage1_objective);
    report->stage1_iters = best_report.stage1_iters;
    report->stage1_converged = best_report.stage1_converged;
  }
  return best;
}

SparseBasis stage2_l1_refine(const Eigen::MatrixXd& k0, const Eigen::MatrixXd& warm_rotation,
                             const Stage2Options& opts, StageReport report) {
  const Eigen::Index d = k0.cols();
  const Eigen::MatrixXd v = k0 * warm_rotation;  // orthonormal columns

  // Mixing coefficients, one unit column per operator; warm start is the
  // Stage-I basis itself.
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd adam_m = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd adam_v = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd best_q = q;
  Eigen::VectorXd best_l1(d), check_l1(d);
  for (Eigen::Index j = 0; j < d; ++j) best_l1[j] = v.col(j).cwiseAbs().sum();
  check_l1 = best_l1;

  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::vector<Eigen::Index> active(d);
  std::vector<int> stalled(d, 0);
  for (Eigen::Index j = 0; j < d; ++j) active[j] = j;

  Eigen::MatrixXd qa, y, grad;
  int t = 0;
  while (t < opts.max_iters && !active.empty()) {
    ++t;
    const double lr = opts.step * std::pow(opts.decay, (t - 1) / opts.decay_every);
    const Eigen::Index na = static_cast<Eigen::Index>(active.size());
    qa.resize(d, na);
    for (Eigen::Index c = 0; c < na; ++c) qa.col(c) = q.col(active[c]);
    y.noalias() = v * qa;
    // Track best iterates (l1 of the current point, before the update).
    for (Eigen::Index c = 0; c < na; ++c) {
      const double l1 = y.col(c).cwiseAbs().sum();
      if (l1 < best_l1[active[c]]) {
        best_l1[active[c]] = l1;
        best_q.col(active[c]) = qa.col(c);
      }
    }
    // Subgradient of the l1 objective, with sign(0) = 0, pulled back to the
    // mixing coordinates and projected onto the sphere tangent.
    grad.noalias() = v.transpose() * y.array().sign().matrix();
    const double bc1 = 1.0 - std::pow(beta1, t);
    const double bc2 = 1.0 - std::pow(beta2, t);
    for (Eigen::Index c = 0; c < na; ++c) {
      const Eigen::Index j = active[c];
      Eigen::VectorXd g = grad.col(c);
      g -= q.col(j).dot(g) * q.col(j);
      adam_m.col(j) = beta1 * adam_m.col(j) + (1.0 - beta1) * g;
      adam_v.col(j) = beta2 * adam_v.col(j) + (1.0 - beta2) * g.cwiseAbs2();
      q.col(j) -= lr * (adam_m.col(j) / bc1)
                      .cwiseQuotient(((adam_v.col(j) / bc2).cwiseSqrt().array() + eps).matrix());
      q.col(j).normalize();
    }
    if (t % opts.window == 0) {
      std::vector<Eigen::Index> still;
      for (Eigen::Index j : active) {
        const double improve = (check_l1[j] - best_l1[j]) / std::max(best_l1[j], 1e-300);
        check_l1[j] = best_l1[j];
        stalled[j] = improve >= opts.conv_tol ? 0 : stalled[j] + 1;
        if (stalled[j] < std::max(1, opts.stall_windows)) still.push_back(j);
      }
      active = std::move(still);
      report.stage2_l1_sum.push_back(best_l1.sum());
    }
  }
  report.stage2_iters = t;

  SparseBasis out;
  out.columns.noalias() = v * best_q;
  for (Eigen::Index j = 0; j < d; ++j) out.columns.col(j).normalize();
  out.l1_norms.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) out.l1_norms[j] = out.columns.col(j).cwiseAbs().sum();
  out.supports.resize(d);
  out.report = std::move(report);
  return out;
}

void hard_threshold(SparseBasis& k, double rel_eps) {
  const Eigen::Index d = k.columns.cols();
  k.supports.assign(d, {});
  for (Eigen::Index j = 0; j < d; ++j) {
    const double cut = rel_eps * k.columns.col(j).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < k.columns.rows(); ++i) {
      if (std::abs(k.columns(i, j)) >= cut && k.columns(i, j) != 0.0)
        k.supports[j].push_back(static_cast<int>(i));
      else
        k.columns(i, j) = 0.0;
    }
    if (k.supports[j].empty())
      throw std::runtime_error("hard_threshold: column collapsed to empty support");
    k.columns.col(j).normalize();
    k.l1_norms[j] = k.columns.col(j).cwiseAbs().sum();
  }
}

std::vector<std::pair<int, int>> detect_duplicates(SparseBasis& k, const Eigen::MatrixXd& k0,
                                                   double cos_tol) {
  const Eigen::Index d = k.columns.cols();
  std::vector<std::pair<int, int>> pairs;
  Eigen::MatrixXd gram = k.columns.transpose() * k.columns;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j)
      if (std::abs(gram(i, j)) > cos_tol) pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
  k.report.duplicates = pairs;

  // Rank repair: if columns no longer span all of span(k0), pull the missing
  // directions back in from the orthogonal complement.
  Eigen::MatrixXd coeff = k0.transpose() * k.columns;  // D x D
  Eigen::BDCSVD<Eigen::MatrixXd> svd(coeff, Eigen::ComputeFullU);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > 1e-6) ++rank;
  if (rank < d) {
    const Eigen::Index missing = d - rank;
    Eigen::MatrixXd extra = k0 * svd.matrixU().rightCols(missing);
    Eigen::MatrixXd grown(k.columns.rows(), d + missing);
    grown << k.columns, extra;
    k.columns = std::move(grown);
    k.l1_norms.conservativeResize(d + missing);
    for (Eigen::Index j = d; j < d + missing; ++j) {
      k.l1_norms[j] = k.columns.col(j).cwiseAbs().sum();
      k.supports.push_back({});
    }
    k.report.refill_count = static_cast<int>(missing);
  }
  return pairs;
}

SparseBasis sparsify(const Eigen::MatrixXd& k0, const Stage1Options& s1, const Stage2Options& s2,
                     double rel_eps, double cos_tol, std::uint64_t seed) {
  StageReport report;
  Eigen::MatrixXd a = stage1_l3_rotate(k0, s1, seed, &report);
  SparseBasis k = stage2_l1_refine(k0, a, s2, std::move(report));
  detect_duplicates(k, k0, cos_tol);
  hard_threshold(k, rel_eps);
  return k;
}

}  // namespace osense
