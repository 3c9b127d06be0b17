#include "godec/lingodec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "godec/brp.hpp"
#include "godec/error.hpp"
#include "godec/matcore.hpp"

namespace godec {

namespace {

constexpr double kSingularTol = 1e-12;

double l1_norm(const DenseMatrix& m) {
  double s = 0.0;
  for (double v : m.data()) s += std::abs(v);
  return s;
}

DenseMatrix truncate(const DenseMatrix& a, std::size_t r, WStepEngine engine, const RngSeed& seed) {
  if (engine == WStepEngine::brp) {
    BrpConfig bc;
    bc.rank = r;
    bc.oversampling = 0;
    bc.seed = seed;
    return brp_approx(a, bc).l;
  }
  return svd_truncate(a, r);
}

// Solves W Rᵀ = B for upper-triangular R, row by row.
DenseMatrix solve_right_rt(const DenseMatrix& b, const DenseMatrix& r) {
  const std::size_t d = r.rows();
  DenseMatrix w(b.rows(), d);
  for (std::size_t i = 0; i < b.rows(); ++i) {
    for (std::size_t kk = d; kk-- > 0;) {
      double acc = b(i, kk);
      for (std::size_t j = kk + 1; j < d; ++j) acc -= r(kk, j) * w(i, j);
      w(i, kk) = acc / r(kk, kk);
    }
  }
  return w;
}

WStep w_step_impl(const DenseMatrix& target, const DenseMatrix& z, std::size_t r, WStepEngine engine,
                  const RngSeed& seed) {
  if (z.cols() == 0) throw ParameterError("lingodec: z has zero columns");
  if (target.cols() != z.rows()) throw DimensionError("lingodec: cols(x) must equal rows(z)");
  if (r < 1 || r > std::min(target.rows(), z.cols())) throw ParameterError("lingodec: rank outside [1, min(m, d)]");

  WStep out;
  if (z.rows() >= z.cols()) {
    const QrFactors qr = qr_thin(z);
    double rmax = 0.0;
    double rmin = qr.r(0, 0);
    for (std::size_t k = 0; k < qr.r.rows(); ++k) {
      rmax = std::max(rmax, qr.r(k, k));
      rmin = std::min(rmin, qr.r(k, k));
    }
    if (rmin > kSingularTol * rmax) {
      const DenseMatrix b = truncate(matmul(target, qr.q), r, engine, seed);
      out.w = solve_right_rt(b, qr.r);
      return out;
    }
  }
  // Z = Uz Σz Vzᵀ restricted to its numerical rank ρ: W = trunc(target·Uz, r) Σz⁻¹ Vzᵀ.
  out.rz_singular = true;
  const SvdFactors f = svd_full(z);
  const std::size_t rho = numerical_rank(f.sigma, kSingularTol);
  if (rho == 0) {
    out.w = DenseMatrix(target.rows(), z.cols());
    return out;
  }
  const DenseMatrix tu = matmul(target, f.u.col_range(0, rho));
  const DenseMatrix b = truncate(tu, std::min({r, tu.rows(), rho}), engine, seed);
  std::vector<double> inv(rho);
  for (std::size_t i = 0; i < rho; ++i) inv[i] = 1.0 / f.sigma[i];
  out.w = matmul_nt(scale_columns(b, inv), f.v.col_range(0, rho));
  return out;
}

}  // namespace

WStep lingodec_w_step(const DenseMatrix& target, const DenseMatrix& z, std::size_t r) {
  return w_step_impl(target, z, r, WStepEngine::svd, RngSeed{});
}

LinGodecResult lingodec(const DenseMatrix& x, const DenseMatrix& z, const LinGodecConfig& cfg,
                        const LinGodecObserver& observe) {
  if (x.empty()) throw DimensionError("lingodec: empty x");
  if (z.cols() == 0) throw ParameterError("lingodec: z has zero columns");
  if (x.cols() != z.rows()) throw DimensionError("lingodec: cols(x) must equal rows(z)");
  if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda)) throw ParameterError("lingodec: lambda must be >= 0");
  if (!(cfg.tolerance > 0.0)) throw ParameterError("lingodec: tolerance must be > 0");
  if (cfg.max_iters < 1) throw ParameterError("lingodec: max_iters must be >= 1");
  if (cfg.rank < 1 || cfg.rank > std::min(x.rows(), z.cols())) {
    throw ParameterError("lingodec: rank outside [1, min(m, d)]");
  }
  ensure_finite(x, "lingodec");
  ensure_finite(z, "lingodec");

  LinGodecResult out;
  out.s = (cfg.sparse_init == SparseInit::soft && cfg.lambda > 0.0) ? soft_threshold(x, cfg.lambda)
                                                                    : DenseMatrix(x.rows(), x.cols());
  // Changes below this are round-off in ‖X‖².
  const double roundoff = 1e-15 * x.squared_norm();
  double prev = -1.0;
  for (std::size_t t = 1; t <= cfg.max_iters; ++t) {
    WStep ws = w_step_impl(x - out.s, z, cfg.rank, cfg.engine, cfg.seed.derive("w", t));
    out.rz_singular = out.rz_singular || ws.rz_singular;
    out.w = std::move(ws.w);
    const DenseMatrix fit = matmul_nt(out.w, z);
    out.s = soft_threshold(x - fit, cfg.lambda);
    const double obj = (x - fit - out.s).squared_norm() + 2.0 * cfg.lambda * l1_norm(out.s);
    out.objective_trace.push_back(obj);
    out.iterations = t;
    if (observe) observe(t, out.w, out.s);
    if (obj == 0.0 || (prev >= 0.0 && std::abs(prev - obj) <= cfg.tolerance * prev + roundoff)) {
      out.converged = true;
      break;
    }
    prev = obj;
  }
  return out;
}

DenseMatrix predict_scores(const DenseMatrix& w, const DenseMatrix& z_new) {
  if (w.cols() != z_new.cols()) {
    throw ParameterError("predict_scores: w has " + std::to_string(w.cols()) + " features, z_new has " +
                         std::to_string(z_new.cols()));
  }
  return matmul_nt(w, z_new);
}

}  // namespace godec
