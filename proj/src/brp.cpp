#include "godec/brp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "godec/error.hpp"
#include "godec/matcore.hpp"

namespace godec {

namespace {

constexpr double kCoreRankTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// (XXᵀ)^q X A
DenseMatrix apply_power(const DenseMatrix& x, const DenseMatrix& a, std::size_t q) {
  DenseMatrix y = matmul(x, a);
  for (std::size_t i = 0; i < q; ++i) y = matmul(x, matmul_tn(x, y));
  return y;
}

// (XᵀX)^q Xᵀ A
DenseMatrix apply_power_t(const DenseMatrix& x, const DenseMatrix& a, std::size_t q) {
  DenseMatrix y = matmul_tn(x, a);
  for (std::size_t i = 0; i < q; ++i) y = matmul_tn(x, matmul(x, y));
  return y;
}

// Orthonormal basis of range((XXᵀ)^q X A), re-orthonormalized between products.
DenseMatrix power_range(const DenseMatrix& x, const DenseMatrix& a, std::size_t q) {
  DenseMatrix z = qr_thin(matmul(x, a)).q;
  for (std::size_t i = 0; i < q; ++i) z = qr_thin(matmul(x, qr_thin(matmul_tn(x, z)).q)).q;
  return z;
}

// Orthonormal basis of range((XᵀX)^q Xᵀ A).
DenseMatrix power_range_t(const DenseMatrix& x, const DenseMatrix& a, std::size_t q) {
  DenseMatrix z = qr_thin(matmul_tn(x, a)).q;
  for (std::size_t i = 0; i < q; ++i) z = qr_thin(matmul_tn(x, qr_thin(matmul(x, z)).q)).q;
  return z;
}

void check_config(const DenseMatrix& x, const BrpConfig& cfg) {
  if (x.empty()) throw DimensionError("brp: empty matrix");
  if (cfg.rank < 1) throw ParameterError("brp: rank must be >= 1");
  if (cfg.rank + cfg.oversampling > std::min(x.rows(), x.cols())) {
    throw ParameterError("brp: rank + oversampling " + std::to_string(cfg.rank + cfg.oversampling) +
                         " exceeds min(m, n) = " + std::to_string(std::min(x.rows(), x.cols())));
  }
}

BrpResult run_with_shrink(const DenseMatrix& x, const BrpConfig& cfg) {
  check_config(x, cfg);
  ensure_finite(x, "brp");
  BrpResult out;
  std::size_t cols = cfg.rank + cfg.oversampling;
  while (cols > 0) {
    BrpAttempt a = brp_attempt(x, cols, cfg.power, cfg.refine, cfg.seed);
    if (a.core_rank >= cols) {
      out.l = std::move(a.l);
      out.effective_rank = cols;
      return out;
    }
    out.rank_reduced = true;
    cols = a.core_rank;
  }
  out.l = DenseMatrix(x.rows(), x.cols());
  out.effective_rank = 0;
  return out;
}

}  // namespace

ProjectionDraw draw_projections(std::size_t m, std::size_t n, std::size_t cols, bool refine,
                                const RngSeed& seed) {
  ProjectionDraw d;
  d.a1 = gaussian_matrix(n, cols, 1.0, seed.derive("a1"));
  if (!refine) d.a2 = gaussian_matrix(m, cols, 1.0, seed.derive("a2"));
  return d;
}

BrpAttempt brp_attempt(const DenseMatrix& x, std::size_t cols, std::size_t power, bool refine,
                       const RngSeed& seed) {
  if (cols < 1 || cols > std::min(x.rows(), x.cols())) throw ParameterError("brp_attempt: bad column count");
  ProjectionDraw d = draw_projections(x.rows(), x.cols(), cols, refine, seed);

  // Y1(A2ᵀY1)⁻¹Y2ᵀ depends on A1 and A2 only through their ranges, so the
  // refined projections are kept orthonormal. Feeding raw power products back
  // in squares the core's condition number to σ^{4(2q+1)}.
  DenseMatrix a1 = std::move(d.a1);
  DenseMatrix a2;
  if (refine) {
    a2 = power_range(x, a1, power);
    a1 = power_range_t(x, a2, power);
  } else {
    a2 = std::move(d.a2);
  }
  const DenseMatrix y1 = apply_power(x, a1, power);
  const DenseMatrix y2 = apply_power_t(x, a2, power);

  BrpAttempt out;
  if (!y1.all_finite() || !y2.all_finite()) return out;
  const DenseMatrix core = matmul_tn(a2, y1);
  const SvdFactors cf = svd_full(core);
  out.core_rank = numerical_rank(cf.sigma, kCoreRankTol);
  if (out.core_rank < cols) return out;

  std::vector<double> inv(cols);
  for (std::size_t i = 0; i < cols; ++i) inv[i] = 1.0 / cf.sigma[i];
  const DenseMatrix core_inv = matmul_nt(scale_columns(cf.v, inv), cf.u);

  if (power == 0) {
    out.l = matmul_nt(matmul(y1, core_inv), y2);
    return out;
  }
  const QrFactors q1 = qr_thin(y1);
  const QrFactors q2 = qr_thin(y2);
  SvdFactors mf = svd_full(matmul_nt(matmul(q1.r, core_inv), q2.r));
  const double expo = 1.0 / static_cast<double>(2 * power + 1);
  for (double& s : mf.sigma) s = std::pow(s, expo);
  out.l = matmul_nt(matmul(q1.q, mf.reconstruct()), q2.q);
  return out;
}

BrpResult brp_approx(const DenseMatrix& x, const BrpConfig& cfg) {
  if (cfg.power > 0) return brp_power(x, cfg);
  return run_with_shrink(x, cfg);
}

BrpResult brp_power(const DenseMatrix& x, const BrpConfig& cfg) {
  if (cfg.power < 1) throw ParameterError("brp_power: power must be >= 1");
  return run_with_shrink(x, cfg);
}

double deterministic_bound_rhs(const std::vector<double>& sigma, std::size_t r, const DenseMatrix& v1t_a1,
                               const DenseMatrix& v2t_a1) {
  if (r < 1 || r > sigma.size()) throw ParameterError("deterministic_bound_rhs: bad rank");
  const std::size_t tail = sigma.size() - r;
  if (tail == 0 || sigma[r] == 0.0) return 0.0;
  if (v1t_a1.rows() != r || v2t_a1.rows() != tail || v1t_a1.cols() != v2t_a1.cols()) {
    throw DimensionError("deterministic_bound_rhs: projection shapes do not match sigma/r");
  }
  if (numerical_rank(svd_full(v1t_a1).sigma, 1e-12) < r) return kInf;

  const DenseMatrix pinv = pseudo_inverse(v1t_a1, 1e-12);  // cols × r
  DenseMatrix left = v2t_a1;
  for (std::size_t i = 0; i < tail; ++i) {
    const double s2 = sigma[r + i] * sigma[r + i];
    for (double& v : left.row(i)) v *= s2;
  }
  std::vector<double> inv(r);
  for (std::size_t i = 0; i < r; ++i) inv[i] = 1.0 / sigma[i];
  const DenseMatrix m = scale_columns(matmul(left, pinv), inv);
  const double a = spectral_norm(m);
  return std::sqrt(a * a + sigma[r] * sigma[r]);
}

double average_bound_rhs(const std::vector<double>& sigma, std::size_t r, std::size_t p) {
  if (p < 2) throw ParameterError("average_bound_rhs: requires p >= 2");
  if (r < 1 || r > sigma.size()) throw ParameterError("average_bound_rhs: bad rank");
  double tail2 = 0.0;
  for (std::size_t i = r; i < sigma.size(); ++i) tail2 += sigma[i] * sigma[i];
  if (tail2 == 0.0) return 0.0;
  const double next = sigma[r];
  double head = 0.0;
  for (std::size_t i = 0; i < r; ++i) head += next * next / (sigma[i] * sigma[i]);
  const double pd = static_cast<double>(p);
  const double first = (std::sqrt(head / (pd - 1.0)) + 1.0) * std::abs(next);
  const double second =
      std::numbers::e * std::sqrt(static_cast<double>(r + p)) / pd * std::sqrt(tail2 / (sigma[r - 1] * sigma[r - 1]));
  return first + second;
}

DeviationBound deviation_bound_rhs(const std::vector<double>& sigma, std::size_t r, std::size_t p, double u,
                                   double t) {
  if (p < 4) throw ParameterError("deviation_bound_rhs: requires p >= 4");
  if (!(u >= 1.0) || !(t >= 1.0)) throw ParameterError("deviation_bound_rhs: requires u, t >= 1");
  if (r < 1 || r > sigma.size()) throw ParameterError("deviation_bound_rhs: bad rank");
  const double pd = static_cast<double>(p);
  DeviationBound out;
  out.failure_probability = std::exp(-u * u / 2.0) + 4.0 * std::pow(t, -pd) + std::pow(t, -(pd + 1.0));

  double tail2 = 0.0;
  for (std::size_t i = r; i < sigma.size(); ++i) tail2 += sigma[i] * sigma[i];
  if (tail2 == 0.0) return out;

  double inv_sum = 0.0;
  for (std::size_t i = 0; i < r; ++i) inv_sum += 1.0 / sigma[i];
  const double lr_inv = 1.0 / sigma[r - 1];
  const double c = std::numbers::e * std::sqrt(static_cast<double>(r + p)) / (pd + 1.0);
  const double next = sigma[r];
  out.rhs = (1.0 + t * std::sqrt(12.0 * static_cast<double>(r) / pd) * std::sqrt(inv_sum) + c * t * u * lr_inv) *
                next * next +
            c * t * lr_inv * std::sqrt(tail2);
  return out;
}

BoundReport evaluate_bounds(const DenseMatrix& x, const BrpConfig& cfg, double u, double t) {
  if (cfg.power != 0) throw ParameterError("evaluate_bounds: bounds are stated for power = 0");
  const BrpResult res = brp_approx(x, cfg);
  const SvdFactors f = svd_full(x);
  const std::size_t r = cfg.rank;
  const std::size_t cols = cfg.rank + cfg.oversampling;
  const ProjectionDraw d = draw_projections(x.rows(), x.cols(), cols, cfg.refine, cfg.seed);

  const std::size_t pmin = f.sigma.size();
  const DenseMatrix v1t_a1 = matmul_tn(f.v.col_range(0, r), d.a1);
  const DenseMatrix v2t_a1 = pmin > r ? matmul_tn(f.v.col_range(r, pmin - r), d.a1) : DenseMatrix(0, cols);

  BoundReport rep;
  rep.observed_error = spectral_norm(x - res.l);
  rep.deterministic_rhs = deterministic_bound_rhs(f.sigma, r, v1t_a1, v2t_a1);
  rep.average_rhs = cfg.oversampling >= 2 ? average_bound_rhs(f.sigma, r, cfg.oversampling) : kInf;
  if (cfg.oversampling >= 4) {
    const DeviationBound dev = deviation_bound_rhs(f.sigma, r, cfg.oversampling, u, t);
    rep.deviation_rhs = dev.rhs;
    rep.deviation_failure_probability = dev.failure_probability;
  } else {
    rep.deviation_rhs = kInf;
  }
  // Absolute slack for round-off when the bound is exactly zero.
  const double slack = 1e-12 * (f.sigma.empty() ? 0.0 : f.sigma.front());
  rep.deterministic_holds = rep.observed_error <= rep.deterministic_rhs + slack;
  rep.average_holds = rep.observed_error <= rep.average_rhs + slack;
  rep.deviation_holds = rep.observed_error <= rep.deviation_rhs + slack;
  return rep;
}

}  // namespace godec
