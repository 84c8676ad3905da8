#include "osense/extract.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "osense/rng.hpp"

namespace osense {

SketchContext make_sketch_context(std::shared_ptr<const SectorBasis> sector,
                                  const OperatorBasis& dict, int r_probes, std::uint64_t seed) {
  if (r_probes < 1) throw std::invalid_argument("make_sketch_context: need r_probes >= 1");
  SketchContext ctx;
  ctx.dict = &dict;
  const auto dim = static_cast<Eigen::Index>(sector->dim());
  ctx.sector = std::move(sector);
  ctx.probes.resize(dim, r_probes);
  Rng rng(seed);
  for (int p = 0; p < r_probes; ++p) {
    for (Eigen::Index i = 0; i < dim; ++i) ctx.probes(i, p) = rng.normal();
    ctx.probes.col(p).normalize();
  }
  return ctx;
}

Eigen::MatrixXd apply_to_probes(const CoeffVector& c, const SketchContext& ctx) {
  return apply_to_images(c, ctx, ctx.probes);
}

Eigen::MatrixXd apply_to_images(const CoeffVector& c, const SketchContext& ctx,
                                const Eigen::MatrixXd& images) {
  Eigen::MatrixXd out(images.rows(), images.cols());
  for (Eigen::Index p = 0; p < images.cols(); ++p) {
    SectorState s{ctx.sector, images.col(p)};
    out.col(p) = apply_coeff_operator(c, *ctx.dict, s).amps;
  }
  return out;
}

RepresentResult represent_in_basis(const Eigen::VectorXd& sketch, const Eigen::MatrixXd& basis) {
  RepresentResult res;
  const double norm = sketch.norm();
  if (norm == 0.0) {
    // A vanishing sketch carries no new action: dependent by convention.
    res.coeffs = Eigen::VectorXd::Zero(basis.cols());
    res.residual = 0.0;
    return res;
  }
  if (basis.cols() == 0) {
    res.residual = 1.0;
    return res;
  }
  res.coeffs = basis.colPivHouseholderQr().solve(sketch);
  res.residual = (basis * res.coeffs - sketch).norm() / norm;
  return res;
}

GeneratorSet extract_generators(const SparseBasis& k, const SketchContext& ctx,
                                double independence_tol, int basis_cap) {
  const Eigen::Index d = k.columns.cols();
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return k.l1_norms[a] < k.l1_norms[b]; });

  GeneratorSet out;
  Eigen::MatrixXd basis(ctx.flat_size(), 0);          // flattened sketches in B
  std::vector<Eigen::MatrixXd> generator_images;       // cached O|probe> blocks

  auto basis_full = [&] { return basis.cols() >= basis_cap; };
  auto push_sketch = [&](const Eigen::MatrixXd& images) {
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = Eigen::Map<const Eigen::VectorXd>(images.data(), images.size());
  };

  for (int idx : order) {
    const CoeffVector c = k.columns.col(idx);
    const Eigen::MatrixXd images = apply_to_probes(c, ctx);
    const Eigen::Map<const Eigen::VectorXd> sketch(images.data(), images.size());
    // A sketch at noise level carries no action (e.g. operators annihilating
    // the sector exactly up to rounding); the relative misfit test would see
    // pure noise as independent, so gate on the absolute norm first.
    const RepresentResult rep = sketch.norm() <= independence_tol
                                    ? RepresentResult{Eigen::VectorXd::Zero(basis.cols()), 0.0}
                                    : represent_in_basis(sketch, basis);
    if (rep.residual <= independence_tol) {
      out.rejected.emplace_back(idx, rep.residual);
      continue;
    }
    if (basis_full()) {
      out.partial = true;
      break;
    }
    // New fundamental generator: extend B with it and with its products
    // against the existing generators, both orders.
    push_sketch(images);
    for (std::size_t gi = 0; gi < generator_images.size(); ++gi) {
      if (basis_full()) {
        out.partial = true;
        break;
      }
      const Eigen::MatrixXd new_then_old = apply_to_images(c, ctx, generator_images[gi]);
      Eigen::Map<const Eigen::VectorXd> s1(new_then_old.data(), new_then_old.size());
      if (s1.norm() > independence_tol && represent_in_basis(s1, basis).residual > independence_tol)
        push_sketch(new_then_old);
      if (basis_full()) {
        out.partial = true;
        break;
      }
      const Eigen::MatrixXd old_then_new = apply_to_images(out.generators[gi], ctx, images);
      Eigen::Map<const Eigen::VectorXd> s2(old_then_new.data(), old_then_new.size());
      if (s2.norm() > independence_tol && represent_in_basis(s2, basis).residual > independence_tol)
        push_sketch(old_then_new);
    }
    out.generators.push_back(c);
    out.l1_norms.push_back(k.l1_norms[idx]);
    out.source_columns.push_back(idx);
    generator_images.push_back(images);
    if (out.partial) break;
  }
  out.basis_size = static_cast<int>(basis.cols());
  return out;
}

}  // namespace osense
