#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "godec/matrix.hpp"
#include "godec/rng.hpp"

namespace godec {

enum class GodecEngine { naive, brp };

struct GodecConfig {
  std::size_t rank = 1;   // r
  std::size_t card = 0;   // k
  double epsilon = 1e-7;  // on ‖X−L−S‖²/‖X‖²
  std::size_t power = 2;  // q, brp engine only
  std::size_t max_iters = 100;
  RngSeed seed{0, "godec"};
  GodecEngine engine = GodecEngine::brp;
};

struct DecompResult {
  DenseMatrix l;
  DenseMatrix s;
  std::vector<double> objective_trace;  // ‖X − Lₜ − Sₜ‖²_F per iteration
  std::size_t iterations = 0;
  bool converged = false;
  std::size_t effective_rank = 0;
  bool rank_reduced = false;
  std::string diagnostic;
};

// Called after every iteration with (t, Lₜ, Sₜ), t starting at 1.
using GodecObserver = std::function<void(std::size_t, const DenseMatrix&, const DenseMatrix&)>;

// Throws ParameterError if cfg is invalid for an m × n input.
void validate(const GodecConfig& cfg, std::size_t m, std::size_t n);

// Lₜ = svd_truncate(X − Sₜ₋₁, r), Sₜ = top-k entries of X − Lₜ.
DecompResult godec_naive(const DenseMatrix& x, const GodecConfig& cfg, const GodecObserver& observe = {});

// Same alternation with Lₜ from the BRP power scheme; if A2ᵀY1 loses rank the
// rank is reduced and the iteration restarts from L = X, S = 0.
DecompResult godec_brp(const DenseMatrix& x, const GodecConfig& cfg, const GodecObserver& observe = {});

DecompResult godec(const DenseMatrix& x, const GodecConfig& cfg, const GodecObserver& observe = {});

}  // namespace godec
