#include "godec/grebsmo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "godec/error.hpp"
#include "godec/matcore.hpp"

namespace godec {

namespace {

constexpr double kDependentTol = 1e-10;
constexpr double kDropTol = 1e-8;

double l1_norm(const DenseMatrix& m) {
  double s = 0.0;
  for (double v : m.data()) s += std::abs(v);
  return s;
}

// Modified Gram-Schmidt (two passes) on the rows of `rows`, first against the
// orthonormal rows of `basis`, then against each other. Rows that lose more
// than 1 - kDropTol of their norm are dropped.
DenseMatrix orthonormalize_rows(const DenseMatrix& rows, const DenseMatrix& basis) {
  const std::size_t n = rows.cols();
  std::vector<double> kept;
  std::size_t count = 0;
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    std::vector<double> v(rows.row(i).begin(), rows.row(i).end());
    double orig = 0.0;
    for (double a : v) orig += a * a;
    orig = std::sqrt(orig);
    if (orig == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      auto project_out = [&](std::span<const double> b) {
        double d = 0.0;
        for (std::size_t j = 0; j < n; ++j) d += v[j] * b[j];
        for (std::size_t j = 0; j < n; ++j) v[j] -= d * b[j];
      };
      for (std::size_t k = 0; k < basis.rows(); ++k) project_out(basis.row(k));
      for (std::size_t k = 0; k < count; ++k) project_out(std::span<const double>(kept).subspan(k * n, n));
    }
    double nrm = 0.0;
    for (double a : v) nrm += a * a;
    nrm = std::sqrt(nrm);
    if (nrm <= kDropTol * orig) continue;
    for (double& a : v) a /= nrm;
    kept.insert(kept.end(), v.begin(), v.end());
    ++count;
  }
  return {count, n, std::move(kept)};
}

void validate(const GrebConfig& cfg, std::size_t m, std::size_t n, double lambda, std::size_t max_rank,
              std::size_t r0) {
  if (m == 0 || n == 0) throw DimensionError("grebsmo: empty input");
  if (cfg.rank_step < 1) throw ParameterError("grebsmo: rank_step must be >= 1");
  if (cfg.inner_iters < 1) throw ParameterError("grebsmo: inner_iters must be >= 1");
  if (!(cfg.tolerance > 0.0)) throw ParameterError("grebsmo: tolerance must be > 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ParameterError("grebsmo: lambda must be >= 0");
  if (max_rank < 1 || max_rank > std::min(m, n)) throw ParameterError("grebsmo: max_rank outside [1, min(m, n)]");
  if (r0 < 1 || r0 > max_rank) throw ParameterError("grebsmo: initial_rank outside [1, max_rank]");
  if (cfg.final_iters < 1) throw ParameterError("grebsmo: final_iters must be >= 1");
}

}  // namespace

GrebStep grebsmo_step(const DenseMatrix& x, const DenseMatrix& v, const DenseMatrix& s, double lambda) {
  ensure_same_shape(x, s, "grebsmo_step");
  if (v.cols() != x.cols()) throw DimensionError("grebsmo_step: V has wrong column count");
  if (v.rows() > x.rows()) throw ParameterError("grebsmo_step: rank exceeds row count");
  const DenseMatrix d = x - s;

  GrebStep out;
  DenseMatrix vcur = v;
  QrFactors qr = qr_thin(matmul_nt(d, vcur));
  double rmax = 0.0;
  for (std::size_t k = 0; k < qr.r.rows(); ++k) rmax = std::max(rmax, qr.r(k, k));
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < qr.r.rows(); ++k)
    if (qr.r(k, k) > kDependentTol * rmax) keep.push_back(k);
  if (keep.empty()) keep.push_back(0);
  if (keep.size() < vcur.rows()) {
    out.rank_reduced = true;
    DenseMatrix reduced(keep.size(), vcur.cols());
    for (std::size_t i = 0; i < keep.size(); ++i) std::ranges::copy(vcur.row(keep[i]), reduced.row(i).begin());
    vcur = std::move(reduced);
    qr = qr_thin(matmul_nt(d, vcur));
  }
  out.u = std::move(qr.q);
  out.v = matmul_tn(out.u, d);
  out.s = soft_threshold(x - matmul(out.u, out.v), lambda);
  return out;
}

double greb_objective(const DenseMatrix& x, const DenseMatrix& u, const DenseMatrix& v, const DenseMatrix& s,
                      double lambda) {
  return (x - matmul(u, v) - s).squared_norm() + 2.0 * lambda * l1_norm(s);
}

DenseMatrix greedy_directions(const DenseMatrix& residual, std::size_t delta_r, DirectionMode mode,
                              const RngSeed& seed) {
  if (delta_r < 1 || delta_r > std::min(residual.rows(), residual.cols())) {
    throw ParameterError("greedy_directions: delta_r outside [1, min(m, n)]");
  }
  if (mode == DirectionMode::exact_svd) {
    const SvdFactors f = svd_full(residual);
    return f.v.col_range(0, delta_r).transpose();
  }
  const DenseMatrix g = gaussian_matrix(delta_r, residual.rows(), 1.0, seed);
  const DenseMatrix y = matmul(g, residual);  // Δr × n
  return qr_thin(y.transpose()).q.transpose();
}

FactoredResult grebsmo(const DenseMatrix& x, const GrebConfig& cfg) {
  const std::size_t m = x.rows();
  const std::size_t n = x.cols();
  const double lambda = cfg.lambda.value_or(1.0 / std::sqrt(static_cast<double>(std::max(m, n))));
  const std::size_t max_rank = cfg.max_rank == 0 ? std::min(m, n) : cfg.max_rank;
  const std::size_t r0 = cfg.initial_rank == 0 ? std::min(cfg.rank_step, max_rank) : cfg.initial_rank;
  validate(cfg, m, n, lambda, max_rank, r0);
  ensure_finite(x, "grebsmo");
  const double xnorm = x.frobenius_norm();
  if (xnorm == 0.0) throw ParameterError("grebsmo: zero input");

  FactoredResult out;
  out.lambda = lambda;
  DenseMatrix v = gaussian_matrix(r0, n, 1.0 / std::sqrt(static_cast<double>(n)), cfg.seed.derive("v0"));
  out.s = (cfg.sparse_init == SparseInit::soft && lambda > 0.0) ? soft_threshold(x, lambda) : DenseMatrix(m, n);
  out.rank_schedule.push_back(r0);

  for (std::size_t phase = 0;; ++phase) {
    const bool last = v.rows() >= max_rank;
    const std::size_t iters = last ? std::max(cfg.final_iters, cfg.inner_iters) : cfg.inner_iters;
    double prev = -1.0;
    for (std::size_t k = 0; k < iters; ++k) {
      GrebStep st = grebsmo_step(x, v, out.s, lambda);
      out.rank_reduced = out.rank_reduced || st.rank_reduced;
      out.u = std::move(st.u);
      v = std::move(st.v);
      out.s = std::move(st.s);
      const double obj = greb_objective(x, out.u, v, out.s, lambda);
      out.objective_trace.push_back(obj);
      out.trace_rank.push_back(v.rows());
      ++out.iterations;
      if (prev >= 0.0 && std::abs(prev - obj) < cfg.tolerance / 10.0 * prev) break;
      prev = obj;
    }
    if (out.rank_schedule.back() != v.rows()) out.rank_schedule.push_back(v.rows());

    const DenseMatrix residual = x - matmul(out.u, v) - out.s;
    out.relative_residual = residual.frobenius_norm() / xnorm;
    if (out.relative_residual <= cfg.tolerance) {
      out.converged = true;
      break;
    }
    if (last) break;

    const std::size_t step = std::min(cfg.rank_step, max_rank - v.rows());
    const DenseMatrix dirs = greedy_directions(residual, step, cfg.direction_mode, cfg.seed.derive("dir", phase));
    const DenseMatrix basis = orthonormalize_rows(v, DenseMatrix(0, n));
    const DenseMatrix fresh = orthonormalize_rows(dirs, basis);
    if (fresh.rows() == 0) break;  // residual directions already in the row space
    v = vstack(v, fresh);
    out.rank_schedule.push_back(v.rows());
  }
  out.v = std::move(v);
  return out;
}

}  // namespace godec
