#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "godec/matrix.hpp"
#include "godec/rng.hpp"

namespace godec {

struct SynthInstance {
  DenseMatrix x;
  DenseMatrix l_true;
  DenseMatrix s_true;
  DenseMatrix g_true;
  std::optional<DenseMatrix> w_true;  // LinGoDec instances: l_true = w_true · zᵀ
  std::optional<DenseMatrix> z;
  std::size_t rank = 0;
  std::string generator;
  std::map<std::string, double> params;
  RngSeed seed;
};

// L = AB with standard Gaussian A (n×r), B (r×n); S has k standard Gaussian
// entries on a uniformly random support; G = noise_sigma · standard Gaussian.
SynthInstance gen_godec_instance(std::size_t n, std::size_t r, std::size_t k, double noise_sigma,
                                 const RngSeed& seed);

// L = UV with U (n×r), V (r×n) ~ N(0, 1/n), r = round(rank_ratio·n) ≥ 1;
// S entries are +1 or −1 with probability ρ/2 each; G = 0.
SynthInstance gen_phase_instance(std::size_t n, double rank_ratio, double rho, const RngSeed& seed);

// X = W*Zᵀ + S + G with W* = (m×r)(r×d) and Z (n×d), all factor entries
// ~ N(0, 1/m); S as in gen_phase_instance; G ~ N(0, noise_std²).
SynthInstance gen_lingodec_instance(std::size_t m, std::size_t n, std::size_t d, double rank_ratio, double rho,
                                    const RngSeed& seed, double noise_std = 1e-3);

enum class PhaseSolver { grebsmo, lingodec, godec };

struct PhaseCellSpec {
  double rho = 0.0;
  double rank_ratio = 0.0;
};

struct PhaseCell {
  double rho = 0.0;
  double rank_ratio = 0.0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  std::vector<double> errors;  // per trial; +∞ marks a solver failure

  double rate() const { return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials); }
};

// Squared relative error at or below which a trial counts as recovered.
inline constexpr double kRecoveryThreshold = 1e-2;

// linspace(0.02, 0.3, 6) on both axes, ρ-major.
std::vector<PhaseCellSpec> default_phase_grid();
std::vector<PhaseCellSpec> make_grid(const std::vector<double>& rhos, const std::vector<double>& rank_ratios);

// Error of one trial: rel_error(L*, L̂) (W* for lingodec), +∞ if the solver threw.
double phase_trial_error(PhaseSolver solver, const PhaseCellSpec& cell, std::size_t n, const RngSeed& trial_seed);

// Runs `trials` instances per cell, trial j of cell i on seed.derive("cell", i).derive("trial", j).
// Results do not depend on `workers` or scheduling.
std::vector<PhaseCell> run_phase_diagram(PhaseSolver solver, const std::vector<PhaseCellSpec>& grid, std::size_t n,
                                         std::size_t trials, const RngSeed& seed, std::size_t workers = 1);

// "rho,rank_ratio,trials,successes,rate" plus one row per cell.
std::string phase_csv(const std::vector<PhaseCell>& cells);

}  // namespace godec
