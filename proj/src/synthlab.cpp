#include "godec/synthlab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <thread>

#include "godec/error.hpp"
#include "godec/godec.hpp"
#include "godec/grebsmo.hpp"
#include "godec/lingodec.hpp"
#include "godec/matcore.hpp"

namespace godec {

namespace {

DenseMatrix rademacher_bernoulli(std::size_t m, std::size_t n, double rho, const RngSeed& seed) {
  RandomStream rng(seed);
  DenseMatrix s(m, n);
  for (double& v : s.data()) {
    const double u = rng.uniform();
    if (u < rho / 2.0) {
      v = 1.0;
    } else if (u < rho) {
      v = -1.0;
    }
  }
  return s;
}

std::size_t planted_rank(double rank_ratio, std::size_t n) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(rank_ratio * static_cast<double>(n))));
}

}  // namespace

SynthInstance gen_godec_instance(std::size_t n, std::size_t r, std::size_t k, double noise_sigma,
                                 const RngSeed& seed) {
  if (n == 0 || r < 1 || r > n) throw ParameterError("gen_godec_instance: need 1 <= r <= n");
  if (k > n * n) throw ParameterError("gen_godec_instance: k exceeds n^2");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw ParameterError("gen_godec_instance: noise_sigma must be >= 0");
  }
  SynthInstance inst;
  inst.generator = "godec";
  inst.params = {{"n", double(n)}, {"r", double(r)}, {"k", double(k)}, {"noise_sigma", noise_sigma}};
  inst.seed = seed;
  inst.rank = r;
  inst.l_true = matmul(gaussian_matrix(n, r, 1.0, seed.derive("A")), gaussian_matrix(r, n, 1.0, seed.derive("B")));

  // Partial Fisher-Yates over the n² positions.
  inst.s_true = DenseMatrix(n, n);
  if (k > 0) {
    RandomStream pick(seed.derive("support"));
    RandomStream value(seed.derive("values"));
    std::vector<std::size_t> pos(n * n);
    std::iota(pos.begin(), pos.end(), std::size_t{0});
    auto s = inst.s_true.data();
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(pick.below(pos.size() - i));
      std::swap(pos[i], pos[j]);
      s[pos[i]] = value.normal();
    }
  }
  inst.g_true = noise_sigma > 0.0 ? gaussian_matrix(n, n, noise_sigma, seed.derive("G")) : DenseMatrix(n, n);
  inst.x = inst.l_true + inst.s_true + inst.g_true;
  return inst;
}

SynthInstance gen_phase_instance(std::size_t n, double rank_ratio, double rho, const RngSeed& seed) {
  if (n == 0) throw ParameterError("gen_phase_instance: n must be >= 1");
  if (!(rank_ratio > 0.0 && rank_ratio < 1.0)) throw ParameterError("gen_phase_instance: rank_ratio must be in (0, 1)");
  if (!(rho >= 0.0 && rho <= 1.0)) throw ParameterError("gen_phase_instance: rho must be in [0, 1]");
  const std::size_t r = std::min(planted_rank(rank_ratio, n), n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  SynthInstance inst;
  inst.generator = "phase";
  inst.params = {{"n", double(n)}, {"rank_ratio", rank_ratio}, {"rho", rho}};
  inst.seed = seed;
  inst.rank = r;
  inst.l_true =
      matmul(gaussian_matrix(n, r, scale, seed.derive("U")), gaussian_matrix(r, n, scale, seed.derive("V")));
  inst.s_true = rademacher_bernoulli(n, n, rho, seed.derive("S"));
  inst.g_true = DenseMatrix(n, n);
  inst.x = inst.l_true + inst.s_true + inst.g_true;
  return inst;
}

SynthInstance gen_lingodec_instance(std::size_t m, std::size_t n, std::size_t d, double rank_ratio, double rho,
                                    const RngSeed& seed, double noise_std) {
  if (m == 0 || n == 0 || d == 0) throw ParameterError("gen_lingodec_instance: zero dimension");
  if (d > n) throw ParameterError("gen_lingodec_instance: need d <= n");
  if (!(rank_ratio > 0.0 && rank_ratio < 1.0)) {
    throw ParameterError("gen_lingodec_instance: rank_ratio must be in (0, 1)");
  }
  if (!(rho >= 0.0 && rho <= 1.0)) throw ParameterError("gen_lingodec_instance: rho must be in [0, 1]");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
    throw ParameterError("gen_lingodec_instance: noise_std must be >= 0");
  }
  const std::size_t r = planted_rank(rank_ratio, n);
  if (r > std::min(m, d)) throw ParameterError("gen_lingodec_instance: planted rank exceeds min(m, d)");
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));

  SynthInstance inst;
  inst.generator = "lingodec";
  inst.params = {{"m", double(m)}, {"n", double(n)},     {"d", double(d)},
                 {"rank_ratio", rank_ratio}, {"rho", rho}, {"noise_std", noise_std}};
  inst.seed = seed;
  inst.rank = r;
  inst.w_true =
      matmul(gaussian_matrix(m, r, scale, seed.derive("W1")), gaussian_matrix(r, d, scale, seed.derive("W2")));
  inst.z = gaussian_matrix(n, d, scale, seed.derive("Z"));
  inst.l_true = matmul_nt(*inst.w_true, *inst.z);
  inst.s_true = rademacher_bernoulli(m, n, rho, seed.derive("S"));
  inst.g_true = noise_std > 0.0 ? gaussian_matrix(m, n, noise_std, seed.derive("G")) : DenseMatrix(m, n);
  inst.x = inst.l_true + inst.s_true + inst.g_true;
  return inst;
}

std::vector<PhaseCellSpec> make_grid(const std::vector<double>& rhos, const std::vector<double>& rank_ratios) {
  std::vector<PhaseCellSpec> grid;
  for (double rho : rhos)
    for (double rr : rank_ratios) grid.push_back({rho, rr});
  return grid;
}

std::vector<PhaseCellSpec> default_phase_grid() {
  std::vector<double> axis(6);
  for (std::size_t i = 0; i < axis.size(); ++i) axis[i] = std::round((0.02 + 0.056 * static_cast<double>(i)) * 1e6) / 1e6;
  return make_grid(axis, axis);
}

double phase_trial_error(PhaseSolver solver, const PhaseCellSpec& cell, std::size_t n, const RngSeed& trial_seed) {
  const double nd = static_cast<double>(n);
  try {
    switch (solver) {
      case PhaseSolver::grebsmo: {
        const SynthInstance inst = gen_phase_instance(n, cell.rank_ratio, cell.rho, trial_seed.derive("instance"));
        GrebConfig cfg;
        cfg.rank_step = 1;
        cfg.inner_iters = 3;
        cfg.tolerance = 1e-6;
        cfg.lambda = 0.6 / nd;
        cfg.max_rank = inst.rank;
        cfg.direction_mode = DirectionMode::random_projection;
        cfg.seed = trial_seed.derive("solver");
        const FactoredResult res = grebsmo(inst.x, cfg);
        return rel_error(inst.l_true, matmul(res.u, res.v));
      }
      case PhaseSolver::godec: {
        const SynthInstance inst = gen_phase_instance(n, cell.rank_ratio, cell.rho, trial_seed.derive("instance"));
        GodecConfig cfg;
        cfg.rank = inst.rank;
        cfg.card = inst.s_true.count_nonzero();
        cfg.epsilon = 1e-7;
        cfg.power = 2;
        cfg.seed = trial_seed.derive("solver");
        const DecompResult res = godec_brp(inst.x, cfg);
        return rel_error(inst.l_true, res.l);
      }
      case PhaseSolver::lingodec: {
        const auto d = static_cast<std::size_t>(std::llround(0.6 * nd));
        const SynthInstance inst =
            gen_lingodec_instance(n, n, d, cell.rank_ratio, cell.rho, trial_seed.derive("instance"));
        LinGodecConfig cfg;
        cfg.rank = inst.rank;
        cfg.lambda = 0.6 / nd;
        cfg.tolerance = 1e-9;
        cfg.max_iters = 300;
        cfg.seed = trial_seed.derive("solver");
        const LinGodecResult res = lingodec(inst.x, *inst.z, cfg);
        return rel_error(*inst.w_true, res.w);
      }
    }
  } catch (const std::exception&) {
  }
  return std::numeric_limits<double>::infinity();
}

std::vector<PhaseCell> run_phase_diagram(PhaseSolver solver, const std::vector<PhaseCellSpec>& grid, std::size_t n,
                                         std::size_t trials, const RngSeed& seed, std::size_t workers) {
  if (trials < 1) throw ParameterError("run_phase_diagram: trials must be >= 1");
  if (n < 2) throw ParameterError("run_phase_diagram: n must be >= 2");
  const std::size_t total = grid.size() * trials;
  std::vector<double> errors(total, std::numeric_limits<double>::infinity());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      const std::size_t i = task / trials;
      const std::size_t j = task % trials;
      errors[task] = phase_trial_error(solver, grid[i], n, seed.derive("cell", i).derive("trial", j));
    }
  };
  const std::size_t nthreads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(total, 1));
  if (nthreads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(work);
  }

  std::vector<PhaseCell> cells;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    PhaseCell c;
    c.rho = grid[i].rho;
    c.rank_ratio = grid[i].rank_ratio;
    c.trials = trials;
    c.errors.assign(errors.begin() + static_cast<std::ptrdiff_t>(i * trials),
                    errors.begin() + static_cast<std::ptrdiff_t>((i + 1) * trials));
    c.successes = static_cast<std::size_t>(
        std::count_if(c.errors.begin(), c.errors.end(), [](double e) { return e <= kRecoveryThreshold; }));
    cells.push_back(std::move(c));
  }
  return cells;
}

std::string phase_csv(const std::vector<PhaseCell>& cells) {
  std::string out = "rho,rank_ratio,trials,successes,rate\n";
  char buf[160];
  for (const PhaseCell& c : cells) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%zu,%zu,%.17g\n", c.rho, c.rank_ratio, c.trials, c.successes,
                  c.rate());
    out += buf;
  }
  return out;
}

}  // namespace godec
