#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "godec/grebsmo.hpp"
#include "godec/matrix.hpp"
#include "godec/rng.hpp"

namespace godec {

enum class WStepEngine { svd, brp };

struct LinGodecConfig {
  std::size_t rank = 1;
  double lambda = 0.0;
  double tolerance = 1e-7;  // relative objective change
  std::size_t max_iters = 200;
  RngSeed seed{0, "lingodec"};
  WStepEngine engine = WStepEngine::svd;
  SparseInit sparse_init = SparseInit::soft;
};

struct LinGodecResult {
  DenseMatrix w;  // users × features
  DenseMatrix s;  // users × items
  std::vector<double> objective_trace;  // ‖X−WZᵀ−S‖² + 2λ‖S‖₁
  std::size_t iterations = 0;
  bool converged = false;
  bool rz_singular = false;  // W-step used the SVD-of-Z path
};

// argmin ‖target − W Zᵀ‖_F over rank(W) ≤ r. With Z = Q R (thin QR) this is
// W = svd_truncate(target·Q, r) · R⁻ᵀ; a singular R switches to Z's SVD.
struct WStep {
  DenseMatrix w;
  bool rz_singular = false;
};
WStep lingodec_w_step(const DenseMatrix& target, const DenseMatrix& z, std::size_t r);

// Called after every alternation with (t, Wₜ, Sₜ), t starting at 1.
using LinGodecObserver = std::function<void(std::size_t, const DenseMatrix&, const DenseMatrix&)>;

LinGodecResult lingodec(const DenseMatrix& x, const DenseMatrix& z, const LinGodecConfig& cfg,
                        const LinGodecObserver& observe = {});

// w · z_newᵀ, one column of scores per new item.
DenseMatrix predict_scores(const DenseMatrix& w, const DenseMatrix& z_new);

}  // namespace godec
