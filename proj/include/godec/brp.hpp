#pragma once

#include <cstddef>
#include <vector>

#include "godec/matrix.hpp"
#include "godec/rng.hpp"

namespace godec {

struct BrpConfig {
  std::size_t rank = 1;
  std::size_t power = 0;         // q
  std::size_t oversampling = 5;  // p, extra projection columns
  RngSeed seed{0, "brp"};
  bool refine = true;  // A2 := Y1, then A1 := Y2
};

struct BrpResult {
  DenseMatrix l;
  std::size_t effective_rank = 0;  // projection columns actually used
  bool rank_reduced = false;       // core A2ᵀY1 was singular and r was shrunk
};

// Gaussian test matrices for one BRP draw. a2 is left empty when refine is on
// (it is then built from Y1).
struct ProjectionDraw {
  DenseMatrix a1;  // n × cols
  DenseMatrix a2;  // m × cols
};
ProjectionDraw draw_projections(std::size_t m, std::size_t n, std::size_t cols, bool refine,
                                const RngSeed& seed);

// One projection round with `cols` columns and no rank shrinking.
// core_rank is the numerical rank (σᵢ > 1e-12·σ₁) of A2ᵀY1; when it is below
// `cols` the approximation is not formed and l is empty.
struct BrpAttempt {
  DenseMatrix l;
  std::size_t core_rank = 0;
};
BrpAttempt brp_attempt(const DenseMatrix& x, std::size_t cols, std::size_t power, bool refine,
                       const RngSeed& seed);

// L = Y1 (A2ᵀY1)⁻¹ Y2ᵀ. A config with power > 0 is forwarded to brp_power.
BrpResult brp_approx(const DenseMatrix& x, const BrpConfig& cfg);

// BRP of X̃ = (XXᵀ)^q X followed by the (2q+1)-th root of the r×r core,
// L = Q1 [R1 (A2ᵀY1)⁻¹ R2ᵀ]^{1/(2q+1)} Q2ᵀ.
BrpResult brp_power(const DenseMatrix& x, const BrpConfig& cfg);

// √(‖Λ2²(V2ᵀA1)(V1ᵀA1)†Λ1⁻¹‖² + ‖Λ2‖²), spectral norms. +∞ when V1ᵀA1 has
// rank below r; 0 when σᵣ₊₁ = 0.
double deterministic_bound_rhs(const std::vector<double>& sigma, std::size_t r, const DenseMatrix& v1t_a1,
                               const DenseMatrix& v2t_a1);

// Expected-error bound; requires p ≥ 2.
double average_bound_rhs(const std::vector<double>& sigma, std::size_t r, std::size_t p);

// Tail bound; requires p ≥ 4 and u, t ≥ 1.
struct DeviationBound {
  double rhs = 0.0;
  double failure_probability = 0.0;
};
DeviationBound deviation_bound_rhs(const std::vector<double>& sigma, std::size_t r, std::size_t p, double u,
                                   double t);

struct BoundReport {
  double observed_error = 0.0;  // ‖X − L‖₂ for the brp_approx output
  double deterministic_rhs = 0.0;
  double average_rhs = 0.0;    // +∞ when p < 2
  double deviation_rhs = 0.0;  // +∞ when p < 4
  double deviation_failure_probability = 1.0;
  bool deterministic_holds = false;
  bool average_holds = false;
  bool deviation_holds = false;
};

// Runs brp_approx (power must be 0) and evaluates all three bounds on the
// same A1 draw.
BoundReport evaluate_bounds(const DenseMatrix& x, const BrpConfig& cfg, double u = 2.0, double t = 2.0);

}  // namespace godec
