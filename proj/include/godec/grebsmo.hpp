#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "godec/matrix.hpp"
#include "godec/rng.hpp"

namespace godec {

enum class DirectionMode { exact_svd, random_projection };

// Starting sparse part for the soft-thresholded solvers. `soft` starts from
// S_λ(X), the S-block minimizer at a zero low-rank part; it falls back to
// zero when λ = 0.
enum class SparseInit { zero, soft };

struct GrebConfig {
  std::size_t rank_step = 1;    // Δr
  std::size_t inner_iters = 3;  // K
  double tolerance = 1e-3;      // τ, on ‖X−UV−S‖_F / ‖X‖_F
  std::optional<double> lambda;  // default 1/√max(m, n)
  std::size_t max_rank = 0;      // 0 means min(m, n)
  std::size_t initial_rank = 0;  // 0 means rank_step
  DirectionMode direction_mode = DirectionMode::exact_svd;
  RngSeed seed{0, "grebsmo"};
  SparseInit sparse_init = SparseInit::soft;
  // Inner iteration cap once the rank can no longer grow.
  std::size_t final_iters = 200;
};

struct FactoredResult {
  DenseMatrix u;  // m × r, orthonormal columns
  DenseMatrix v;  // r × n
  DenseMatrix s;
  std::vector<double> objective_trace;  // ‖X−UV−S‖² + 2λ‖S‖₁ per inner step
  std::vector<std::size_t> trace_rank;  // rank of V at each trace entry
  std::vector<std::size_t> rank_schedule;
  std::size_t iterations = 0;  // inner steps in total
  bool converged = false;
  bool rank_reduced = false;  // dependent columns of (X−S)Vᵀ were dropped
  double relative_residual = 0.0;
  double lambda = 0.0;
};

struct GrebStep {
  DenseMatrix u;
  DenseMatrix v;
  DenseMatrix s;
  bool rank_reduced = false;
};

// U = Q of QR((X−S)Vᵀ), V = Uᵀ(X−S), S = S_λ(X − UV).
GrebStep grebsmo_step(const DenseMatrix& x, const DenseMatrix& v, const DenseMatrix& s, double lambda);

// ‖X−UV−S‖² + 2λ‖S‖₁
double greb_objective(const DenseMatrix& x, const DenseMatrix& u, const DenseMatrix& v, const DenseMatrix& s,
                      double lambda);

// Δr × n matrix with orthonormal rows approximating the top right singular
// directions of `residual`.
DenseMatrix greedy_directions(const DenseMatrix& residual, std::size_t delta_r, DirectionMode mode,
                              const RngSeed& seed);

FactoredResult grebsmo(const DenseMatrix& x, const GrebConfig& cfg);

}  // namespace godec
