#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

namespace osense {

struct Stage1Options {
  int max_iters = 2000;
  double conv_tol = 1e-10;
  int restarts = 1;  // random orthogonal starts, best final l1 sum kept
};

struct Stage2Options {
  double step = 1e-2;
  double decay = 0.5;
  int decay_every = 2000;
  int max_iters = 20000;
  double conv_tol = 1e-9;  // relative best-l1 improvement per window
  int window = 200;
  // Progress arrives in bursts right after each step-size decay (the sign
  // subgradient makes iterates oscillate at the step scale in between), so a
  // column retires only after this many consecutive stalled windows — enough
  // to span two full decay periods.
  int stall_windows = 20;
};

struct StageReport {
  std::vector<double> stage1_objective;  // full per-iteration l3^3 trace
  int stage1_iters = 0;
  bool stage1_converged = false;
  std::vector<double> stage2_l1_sum;  // sum of per-column best l1, per window
  int stage2_iters = 0;
  std::vector<std::pair<int, int>> duplicates;
  int refill_count = 0;
};

struct SparseBasis {
  Eigen::MatrixXd columns;  // N_W x D_K, unit l2 columns
  std::vector<std::vector<int>> supports;
  Eigen::VectorXd l1_norms;
  StageReport report;
};

// Stage I: fixed-point ascent on the orthogonal group maximizing the
// elementwise l3 spikiness of K0*A. Each step forms G = K0^T (Y .* |Y|) with
// Y = K0*A and replaces A by the polar factor of G (SVD U V^T), which never
// decreases the objective.
Eigen::MatrixXd stage1_l3_rotate(const Eigen::MatrixXd& k0, const Stage1Options& opts,
                                 std::uint64_t seed, StageReport* report = nullptr);

// Stage II: per-column l1 descent on the unit sphere of mixing coefficients
// over the Stage-I basis, with Adam-style per-coordinate scaling, explicit
// renormalization each step, and best-iterate return. Columns are independent
// and are processed batched for speed; a column retires once its best l1
// stops improving.
SparseBasis stage2_l1_refine(const Eigen::MatrixXd& k0, const Eigen::MatrixXd& warm_rotation,
                             const Stage2Options& opts, StageReport report = {});

// Keep entries with |k_i| >= rel_eps * max|k| per column, renormalize, record
// supports. Throws if a column collapses to nothing.
void hard_threshold(SparseBasis& k, double rel_eps = 1e-4);

// Pairs of near-parallel columns; if the basis lost rank, missing directions
// from the orthogonal complement within span(k0) are appended and counted in
// report.refill_count.
std::vector<std::pair<int, int>> detect_duplicates(SparseBasis& k, const Eigen::MatrixXd& k0,
                                                   double cos_tol = 0.999);

// Full sparsification chain: Stage I, Stage II, duplicate handling, threshold.
SparseBasis sparsify(const Eigen::MatrixXd& k0, const Stage1Options& s1, const Stage2Options& s2,
                     double rel_eps, double cos_tol, std::uint64_t seed);

}  // namespace osense
