#include "godec/godec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "godec/brp.hpp"
#include "godec/error.hpp"
#include "godec/matcore.hpp"

namespace godec {

namespace {

DecompResult zero_input(const DenseMatrix& x, const GodecConfig& cfg) {
  DecompResult out;
  out.l = DenseMatrix(x.rows(), x.cols());
  out.s = DenseMatrix(x.rows(), x.cols());
  out.converged = true;
  out.effective_rank = cfg.rank;
  out.diagnostic = "zero input";
  return out;
}

}  // namespace

void validate(const GodecConfig& cfg, std::size_t m, std::size_t n) {
  if (m == 0 || n == 0) throw DimensionError("godec: empty input");
  if (cfg.rank < 1 || cfg.rank > std::min(m, n)) {
    throw ParameterError("godec: rank " + std::to_string(cfg.rank) + " outside [1, " +
                         std::to_string(std::min(m, n)) + "]");
  }
  if (cfg.card > m * n) throw ParameterError("godec: card exceeds m*n");
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) throw ParameterError("godec: epsilon must be > 0");
  if (cfg.max_iters < 1) throw ParameterError("godec: max_iters must be >= 1");
}

DecompResult godec_naive(const DenseMatrix& x, const GodecConfig& cfg, const GodecObserver& observe) {
  validate(cfg, x.rows(), x.cols());
  ensure_finite(x, "godec_naive");
  const double xnorm2 = x.squared_norm();
  if (xnorm2 == 0.0) return zero_input(x, cfg);

  DecompResult out;
  out.effective_rank = cfg.rank;
  out.s = DenseMatrix(x.rows(), x.cols());
  for (std::size_t t = 1; t <= cfg.max_iters; ++t) {
    out.l = svd_truncate(x - out.s, cfg.rank);
    out.s = hard_threshold_entries(x - out.l, cfg.card);
    const double obj = (x - out.l - out.s).squared_norm();
    out.objective_trace.push_back(obj);
    out.iterations = t;
    if (observe) observe(t, out.l, out.s);
    if (obj / xnorm2 <= cfg.epsilon) {
      out.converged = true;
      break;
    }
  }
  return out;
}

DecompResult godec_brp(const DenseMatrix& x, const GodecConfig& cfg, const GodecObserver& observe) {
  validate(cfg, x.rows(), x.cols());
  ensure_finite(x, "godec_brp");
  const double xnorm2 = x.squared_norm();
  if (xnorm2 == 0.0) return zero_input(x, cfg);

  DecompResult out;
  std::size_t r = cfg.rank;
  out.l = x;
  out.s = DenseMatrix(x.rows(), x.cols());
  for (std::size_t t = 1; t <= cfg.max_iters; ++t) {
    out.iterations = t;
    BrpAttempt a = brp_attempt(x - out.s, r, cfg.power, true, cfg.seed.derive("iter", t));
    if (a.core_rank < r) {
      out.rank_reduced = true;
      r = a.core_rank;
      if (r == 0) {
        out.diagnostic = "rank of A2^T Y1 dropped to 0 at iteration " + std::to_string(t);
        out.effective_rank = 0;
        return out;
      }
      out.diagnostic = "rank reduced to " + std::to_string(r) + " at iteration " + std::to_string(t);
      out.l = x;
      out.s = DenseMatrix(x.rows(), x.cols());
      out.objective_trace.clear();
      continue;
    }
    out.l = std::move(a.l);
    out.s = hard_threshold_entries(x - out.l, cfg.card);
    const double obj = (x - out.l - out.s).squared_norm();
    out.objective_trace.push_back(obj);
    if (observe) observe(t, out.l, out.s);
    if (obj / xnorm2 <= cfg.epsilon) {
      out.converged = true;
      break;
    }
  }
  out.effective_rank = r;
  return out;
}

DecompResult godec(const DenseMatrix& x, const GodecConfig& cfg, const GodecObserver& observe) {
  return cfg.engine == GodecEngine::naive ? godec_naive(x, cfg, observe) : godec_brp(x, cfg, observe);
}

}  // namespace godec
