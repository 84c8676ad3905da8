#pragma once

// Oracle helpers for the unit tests: operators are rebuilt in the full
// 2^N-dimensional space from explicit 2x2 Kronecker factors, then restricted
// to the magnetization sector, independently of the bitmask fast paths in the
// library under test. Only sensible for small N.

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "osense/kernel.hpp"
#include "osense/spin.hpp"

namespace oracle {

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Local basis order (index 0 = down, index 1 = up) matches the library's
// bitmask convention: bit i of a configuration holds site i, set = up.
inline Eigen::MatrixXd pauli_z() {
  Eigen::MatrixXd z(2, 2);
  z << -1, 0, 0, 1;
  return z;
}
inline Eigen::MatrixXd pauli_x() {
  Eigen::MatrixXd x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}
inline Eigen::MatrixXd pauli_y_imagless() {
  // sigma_y = i * this matrix; products of two sigma_y factors stay real.
  Eigen::MatrixXd y(2, 2);
  y << 0, 1, -1, 0;
  return y;
}

// Full-space operator with the given single-site factor at `site`; site 0 is
// the least significant bit of the full-space index.
inline Eigen::MatrixXd site_op(int n, int site, const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(1, 1);
  for (int s = n - 1; s >= 0; --s)
    out = kron(out, s == site ? m : Eigen::MatrixXd::Identity(2, 2));
  return out;
}

inline Eigen::MatrixXd full_operator(const osense::BasisOperator& op, int n) {
  using osense::OpKind;
  const auto Z = pauli_z();
  switch (op.kind) {
    case OpKind::Z:
      return site_op(n, op.i, Z);
    case OpKind::ZZ:
      return site_op(n, op.i, Z) * site_op(n, op.j, Z);
    case OpKind::Hop: {
      // sigma+_i sigma-_j + sigma-_i sigma+_j = (XX + YY)/2
      const Eigen::MatrixXd xx = site_op(n, op.i, pauli_x()) * site_op(n, op.j, pauli_x());
      const Eigen::MatrixXd yy =
          -site_op(n, op.i, pauli_y_imagless()) * site_op(n, op.j, pauli_y_imagless());
      return 0.5 * (xx + yy);
    }
    case OpKind::ZZZ:
      return site_op(n, op.i, Z) * site_op(n, op.j, Z) * site_op(n, op.k, Z);
    case OpKind::HopZ: {
      const Eigen::MatrixXd xx = site_op(n, op.i, pauli_x()) * site_op(n, op.j, pauli_x());
      const Eigen::MatrixXd yy =
          -site_op(n, op.i, pauli_y_imagless()) * site_op(n, op.j, pauli_y_imagless());
      return 0.5 * (xx + yy) * site_op(n, op.k, Z);
    }
  }
  throw std::logic_error("unknown kind");
}

// Restrict a full-space matrix to the sector spanned by `basis` states.
inline Eigen::MatrixXd to_sector(const Eigen::MatrixXd& full, const osense::SectorBasis& basis) {
  const auto d = static_cast<Eigen::Index>(basis.dim());
  Eigen::MatrixXd out(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) out(r, c) = full(basis.states[r], basis.states[c]);
  return out;
}

inline double hs_norm(const Eigen::MatrixXd& full) { return full.norm(); }

// Dense sector matrix of a whole coefficient vector in the unit-HS-norm
// convention, built entirely from the Kronecker oracle.
inline Eigen::MatrixXd coeff_operator_matrix(const osense::CoeffVector& c,
                                             const osense::OperatorBasis& dict,
                                             const osense::SectorBasis& basis) {
  const auto d = static_cast<Eigen::Index>(basis.dim());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < dict.size(); ++i) {
    if (c[i] == 0.0) continue;
    const Eigen::MatrixXd full = full_operator(dict.ops[i], dict.n_sites);
    out += (c[i] / hs_norm(full)) * to_sector(full, basis);
  }
  return out;
}

inline int binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

}  // namespace oracle
