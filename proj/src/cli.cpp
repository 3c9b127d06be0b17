#include "godec/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>

#include "godec/brp.hpp"
#include "godec/error.hpp"
#include "godec/godec.hpp"
#include "godec/grebsmo.hpp"
#include "godec/lingodec.hpp"
#include "godec/matcore.hpp"
#include "godec/synthlab.hpp"
#include "godec/video.hpp"

namespace godec {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

DenseMatrix load_input(const RunConfig& cfg, const fs::path& p) {
  if (!fs::exists(p)) throw FormatError(p.string() + ": no such file");
  DenseMatrix m = load_matrix(p, cfg.in_format.value_or(format_for_path(p)));
  return cfg.transpose ? m.transpose() : m;
}

std::optional<DenseMatrix> load_truth(const RunConfig& cfg, const fs::path& p) {
  if (p.empty()) return std::nullopt;
  return load_input(cfg, p);
}

// Writes `m` (transposed back when the run was on Xᵀ) as out_dir/stem.<ext>.
void write_output(const RunConfig& cfg, const std::string& stem, const DenseMatrix& m, bool oriented = true) {
  fs::path p = cfg.out_dir / (stem + std::string(format_extension(cfg.out_format)));
  save_matrix(p, (oriented && cfg.transpose) ? m.transpose() : m, cfg.out_format);
}

// Sets key to rel_error(truth, estimate) unless the truth is absent or zero.
void put_rel_error(Json& j, const char* key, const std::optional<DenseMatrix>& truth, const DenseMatrix& estimate) {
  if (!truth || truth->squared_norm() == 0.0) return;
  j[key] = rel_error(*truth, estimate);
}

Json metrics_base(double rel_x) {
  Json j;
  j["rel_error_x"] = rel_x;
  return j;
}

void finish_metrics(const RunConfig& cfg, Json& j, std::size_t iterations, double wall, std::size_t rank,
                    bool converged) {
  j["iterations"] = iterations;
  j["wall_seconds"] = wall;
  j["effective_rank"] = rank;
  j["converged"] = converged;
  write_file_atomic(cfg.out_dir / "metrics.json", j.dump(2) + "\n");
}

RngSeed root_seed(const RunConfig& cfg) { return {cfg.seed, "cli"}; }

int cmd_decompose(const RunConfig& cfg) {
  if (cfg.input.empty()) throw ParameterError("decompose: --in is required");
  const DenseMatrix x = load_input(cfg, cfg.input);
  const auto truth_l = load_truth(cfg, cfg.truth_l);
  const auto truth_s = load_truth(cfg, cfg.truth_s);

  const auto t0 = Clock::now();
  DenseMatrix l;
  DenseMatrix s;
  std::size_t iterations = 0;
  std::size_t rank = 0;
  bool converged = false;
  if (cfg.engine == "godec-brp" || cfg.engine == "godec-naive") {
    GodecConfig gc;
    gc.rank = cfg.rank;
    gc.card = cfg.card;
    gc.epsilon = cfg.eps;
    gc.power = cfg.power;
    gc.max_iters = cfg.max_iters;
    gc.seed = root_seed(cfg).derive("godec");
    gc.engine = cfg.engine == "godec-brp" ? GodecEngine::brp : GodecEngine::naive;
    validate(gc, x.rows(), x.cols());
    DecompResult r = godec(x, gc);
    if (!r.diagnostic.empty()) std::cerr << "godec: " << r.diagnostic << "\n";
    l = std::move(r.l);
    s = std::move(r.s);
    iterations = r.iterations;
    rank = r.effective_rank;
    converged = r.converged;
  } else if (cfg.engine == "grebsmo") {
    GrebConfig gc;
    gc.rank_step = cfg.rank_step;
    gc.inner_iters = cfg.inner_iters;
    gc.tolerance = cfg.tolerance;
    gc.lambda = cfg.lambda;
    gc.max_rank = cfg.max_rank;
    gc.direction_mode = cfg.directions == "random" ? DirectionMode::random_projection : DirectionMode::exact_svd;
    gc.seed = root_seed(cfg).derive("grebsmo");
    FactoredResult r = grebsmo(x, gc);
    if (r.rank_reduced) std::cerr << "grebsmo: dependent columns dropped, rank reduced\n";
    l = matmul(r.u, r.v);
    s = std::move(r.s);
    iterations = r.iterations;
    rank = r.v.rows();
    converged = r.converged;
  } else {
    throw ParameterError("decompose: unknown engine '" + cfg.engine + "'");
  }
  const double wall = seconds_since(t0);

  write_output(cfg, "L", l);
  write_output(cfg, "S", s);
  Json j = metrics_base(rel_error(x, l + s));
  put_rel_error(j, "rel_error_l", truth_l, l);
  put_rel_error(j, "rel_error_s", truth_s, s);
  finish_metrics(cfg, j, iterations, wall, rank, converged);
  return converged ? kExitOk : kExitNotConverged;
}

int cmd_lowrank(const RunConfig& cfg) {
  if (cfg.input.empty()) throw ParameterError("lowrank: --in is required");
  const DenseMatrix x = load_input(cfg, cfg.input);
  const auto truth_l = load_truth(cfg, cfg.truth_l);
  BrpConfig bc;
  bc.rank = cfg.rank;
  bc.power = cfg.power;
  bc.oversampling = cfg.oversampling;
  bc.refine = cfg.refine;
  bc.seed = root_seed(cfg).derive("brp");
  const auto t0 = Clock::now();
  const BrpResult r = brp_approx(x, bc);
  const double wall = seconds_since(t0);
  if (r.rank_reduced) std::cerr << "lowrank: singular core, rank reduced to " << r.effective_rank << "\n";
  write_output(cfg, "L", r.l);
  Json j = metrics_base(rel_error(x, r.l));
  put_rel_error(j, "rel_error_l", truth_l, r.l);
  finish_metrics(cfg, j, 1, wall, r.effective_rank, true);
  return kExitOk;
}

int cmd_lingodec(const RunConfig& cfg) {
  if (cfg.input.empty() || cfg.z_input.empty()) throw ParameterError("lingodec: --in and --z are required");
  const DenseMatrix x = load_input(cfg, cfg.input);
  const DenseMatrix z = load_matrix(cfg.z_input, cfg.in_format.value_or(format_for_path(cfg.z_input)));
  const auto truth_l = load_truth(cfg, cfg.truth_l);
  const auto truth_s = load_truth(cfg, cfg.truth_s);
  std::optional<DenseMatrix> truth_w;
  if (!cfg.truth_w.empty()) truth_w = load_matrix(cfg.truth_w, format_for_path(cfg.truth_w));

  LinGodecConfig lc;
  lc.rank = cfg.rank;
  lc.lambda = cfg.lambda.value_or(0.0);
  lc.tolerance = cfg.tolerance;
  lc.max_iters = cfg.max_iters;
  lc.seed = root_seed(cfg).derive("lingodec");
  if (cfg.engine == "brp") {
    lc.engine = WStepEngine::brp;
  } else if (cfg.engine == "svd") {
    lc.engine = WStepEngine::svd;
  } else {
    throw ParameterError("lingodec: unknown engine '" + cfg.engine + "' (expected svd or brp)");
  }
  const auto t0 = Clock::now();
  const LinGodecResult r = lingodec(x, z, lc);
  const double wall = seconds_since(t0);
  if (r.rz_singular) std::cerr << "lingodec: Z is rank deficient, used its SVD in the W step\n";

  const DenseMatrix fit = matmul_nt(r.w, z);
  write_output(cfg, "W", r.w, false);
  write_output(cfg, "S", r.s);
  Json j = metrics_base(rel_error(x, fit + r.s));
  put_rel_error(j, "rel_error_l", truth_l, fit);
  put_rel_error(j, "rel_error_s", truth_s, r.s);
  put_rel_error(j, "rel_error_w", truth_w, r.w);
  finish_metrics(cfg, j, r.iterations, wall, numerical_rank(r.w, 1e-10), r.converged);
  return r.converged ? kExitOk : kExitNotConverged;
}

int cmd_synth(const RunConfig& cfg) {
  const RngSeed seed = root_seed(cfg).derive("synth");
  SynthInstance inst;
  if (cfg.generator == "godec") {
    inst = gen_godec_instance(cfg.n, cfg.rank, cfg.card, cfg.noise, seed);
  } else if (cfg.generator == "phase") {
    inst = gen_phase_instance(cfg.n, cfg.rank_ratio, cfg.rho, seed);
  } else if (cfg.generator == "lingodec") {
    const std::size_t m = cfg.m == 0 ? cfg.n : cfg.m;
    const std::size_t d =
        cfg.d == 0 ? static_cast<std::size_t>(std::llround(0.6 * static_cast<double>(cfg.n))) : cfg.d;
    inst = gen_lingodec_instance(m, cfg.n, d, cfg.rank_ratio, cfg.rho, seed, cfg.noise);
  } else {
    throw ParameterError("synth: unknown generator '" + cfg.generator + "'");
  }
  const double recompose = rel_error(inst.x, inst.l_true + inst.s_true + inst.g_true);
  if (recompose > 1e-24) {
    std::cerr << "synth: recomposition check failed (" << recompose << ")\n";
    return kExitInputError;
  }
  write_output(cfg, "x", inst.x, false);
  write_output(cfg, "l_true", inst.l_true, false);
  write_output(cfg, "s_true", inst.s_true, false);
  write_output(cfg, "g_true", inst.g_true, false);
  if (inst.w_true) write_output(cfg, "w_true", *inst.w_true, false);
  if (inst.z) write_output(cfg, "z", *inst.z, false);

  Json j;
  j["generator"] = inst.generator;
  j["seed"] = cfg.seed;
  j["rank"] = inst.rank;
  j["params"] = inst.params;
  j["recomposition_rel_error"] = recompose;
  write_file_atomic(cfg.out_dir / "instance.json", j.dump(2) + "\n");
  return kExitOk;
}

int cmd_phase(const RunConfig& cfg) {
  PhaseSolver solver;
  if (cfg.solver == "grebsmo") {
    solver = PhaseSolver::grebsmo;
  } else if (cfg.solver == "godec") {
    solver = PhaseSolver::godec;
  } else if (cfg.solver == "lingodec") {
    solver = PhaseSolver::lingodec;
  } else {
    throw ParameterError("phase: unknown solver '" + cfg.solver + "'");
  }
  std::vector<PhaseCellSpec> grid;
  if (cfg.grid == "default") {
    grid = default_phase_grid();
  } else if (cfg.grid == "custom") {
    if (cfg.rho_grid.empty() || cfg.rank_grid.empty()) {
      throw ParameterError("phase: --grid custom needs --rho-grid and --rank-grid");
    }
    grid = make_grid(cfg.rho_grid, cfg.rank_grid);
  } else {
    throw ParameterError("phase: --grid must be default or custom");
  }
  const auto t0 = Clock::now();
  const auto cells = run_phase_diagram(solver, grid, cfg.n, cfg.trials, root_seed(cfg).derive("phase"), cfg.workers);
  std::cerr << "phase: " << cells.size() << " cells in " << seconds_since(t0) << " s\n";
  write_file_atomic(cfg.out_dir / "phase.csv", phase_csv(cells));
  return kExitOk;
}

GrayImage to_image(std::span<const double> row, std::size_t w, std::size_t h) {
  GrayImage img;
  img.width = w;
  img.height = h;
  img.pixels.resize(w * h);
  for (std::size_t i = 0; i < w * h; ++i)
    img.pixels[i] = static_cast<std::uint8_t>(std::lround(std::clamp(row[i], 0.0, 1.0) * 255.0));
  return img;
}

std::string frame_name(std::size_t t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%04zu.pgm", t);
  return buf;
}

int cmd_video_demo(const RunConfig& cfg) {
  const SyntheticVideo video = make_moving_square_video(cfg.width, cfg.height, cfg.frames);
  const fs::path frames_dir = cfg.out_dir / "frames";
  const fs::path bg_dir = cfg.out_dir / "background";
  const fs::path fg_dir = cfg.out_dir / "foreground";
  for (const auto& d : {frames_dir, bg_dir, fg_dir}) fs::create_directories(d);
  for (std::size_t t = 0; t < cfg.frames; ++t) {
    write_pgm(frames_dir / frame_name(t), to_image(video.frames.row(t), video.width, video.height));
  }

  // Frames go through the same PGM loader a real sequence would.
  const DenseMatrix x = load_frames(frames_dir);
  const auto t0 = Clock::now();
  const VideoDemoResult r = run_video_demo(video, x, root_seed(cfg).derive("video"));
  const double wall = seconds_since(t0);

  const auto masks = foreground_masks(r.decomposition.s);
  for (std::size_t t = 0; t < cfg.frames; ++t) {
    write_pgm(bg_dir / frame_name(t), to_image(r.decomposition.l.row(t), video.width, video.height));
    GrayImage fg;
    fg.width = video.width;
    fg.height = video.height;
    for (bool b : masks[t]) fg.pixels.push_back(b ? 255 : 0);
    write_pgm(fg_dir / frame_name(t), fg);
  }
  write_output(cfg, "L", r.decomposition.l, false);
  write_output(cfg, "S", r.decomposition.s, false);

  Json j = metrics_base(rel_error(x, r.decomposition.l + r.decomposition.s));
  j["min_jaccard"] = r.min_jaccard;
  j["mean_jaccard"] = r.mean_jaccard;
  j["jaccard"] = r.jaccard;
  finish_metrics(cfg, j, r.decomposition.iterations, wall, r.decomposition.effective_rank,
                 r.decomposition.converged);
  std::cerr << "video-demo: min Jaccard " << r.min_jaccard << ", mean " << r.mean_jaccard << "\n";
  return r.decomposition.converged ? kExitOk : kExitNotConverged;
}

}  // namespace

int run(const RunConfig& cfg) {
  try {
    fs::create_directories(cfg.out_dir);
    switch (cfg.command) {
      case Command::decompose:
        return cmd_decompose(cfg);
      case Command::lowrank:
        return cmd_lowrank(cfg);
      case Command::lingodec:
        return cmd_lingodec(cfg);
      case Command::synth:
        return cmd_synth(cfg);
      case Command::phase:
        return cmd_phase(cfg);
      case Command::video_demo:
        return cmd_video_demo(cfg);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kExitInputError;
}

int run_cli(int argc, const char* const* argv) {
  RunConfig cfg;
  std::string input;
  std::string z_input;
  std::string truth_l;
  std::string truth_s;
  std::string truth_w;
  std::string in_format;
  std::string out_dir = ".";
  std::string out_format = "csv";
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double lin_tol = 1e-7;
  std::string lin_engine = "svd";

  CLI::App app{"Low-rank + sparse matrix decomposition (GoDec, BRP, GreBsmo, LinGoDec)"};
  app.set_config("--config", "", "TOML-style key = value file; command-line flags take precedence");
  app.require_subcommand(1);

  auto add_io = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--out-format", out_format, "Output matrix format")->check(CLI::IsMember({"csv", "f64le"}));
  };
  auto add_input = [&](CLI::App* sub) {
    sub->add_option("--in", input, "Input matrix X (.csv or .f64le)");
    sub->add_option("--format", in_format, "Input format, overriding the extension")
        ->check(CLI::IsMember({"csv", "f64le"}));
    sub->add_option("--truth-l", truth_l, "Ground-truth low-rank part, for metrics");
    sub->add_flag("--transpose", cfg.transpose, "Solve on the transposed input (frames as columns)");
  };
  auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", cfg.seed, "Random seed"); };

  CLI::App* dec = app.add_subcommand("decompose", "X = L + S + G via GoDec or GreBsmo");
  add_input(dec);
  add_io(dec);
  add_seed(dec);
  dec->add_option("--truth-s", truth_s, "Ground-truth sparse part, for metrics");
  dec->add_option("--engine", cfg.engine, "godec-brp | godec-naive | grebsmo")
      ->check(CLI::IsMember({"godec-brp", "godec-naive", "grebsmo"}));
  dec->add_option("--rank", cfg.rank, "Rank bound r");
  dec->add_option("--card", cfg.card, "Cardinality bound k");
  dec->add_option("--eps", cfg.eps, "Stopping tolerance on ||X-L-S||^2/||X||^2");
  dec->add_option("--q", cfg.power, "Power scheme exponent");
  dec->add_option("--max-iters", cfg.max_iters, "Iteration cap");
  dec->add_option("--lambda", lambda, "GreBsmo l1 weight (default 1/sqrt(max(m,n)))");
  dec->add_option("--tol", cfg.tolerance, "GreBsmo relative residual tolerance");
  dec->add_option("--rank-step", cfg.rank_step, "GreBsmo rank increment");
  dec->add_option("--inner-iters", cfg.inner_iters, "GreBsmo inner iterations per rank");
  dec->add_option("--max-rank", cfg.max_rank, "GreBsmo rank cap (0 = min(m,n))");
  dec->add_option("--directions", cfg.directions, "GreBsmo directions: exact | random")
      ->check(CLI::IsMember({"exact", "random"}));

  CLI::App* low = app.add_subcommand("lowrank", "Bilateral random projection approximation");
  add_input(low);
  add_io(low);
  add_seed(low);
  low->add_option("--rank", cfg.rank, "Target rank r");
  low->add_option("--q", cfg.power, "Power scheme exponent");
  low->add_option("--oversampling", cfg.oversampling, "Extra projection columns p");
  low->add_flag("!--no-refine", cfg.refine, "Keep the raw Gaussian A2");

  CLI::App* lin = app.add_subcommand("lingodec", "X = W Z^T + S + G with known item features Z");
  add_input(lin);
  add_io(lin);
  add_seed(lin);
  lin->add_option("--z", z_input, "Item feature matrix Z (items x features)");
  lin->add_option("--truth-s", truth_s, "Ground-truth sparse part, for metrics");
  lin->add_option("--truth-w", truth_w, "Ground-truth W, for metrics");
  lin->add_option("--rank", cfg.rank, "Rank bound on W");
  lin->add_option("--lambda", lambda, "l1 weight (default 0)");
  lin->add_option("--tol", lin_tol, "Relative objective change tolerance");
  lin->add_option("--max-iters", cfg.max_iters, "Iteration cap");
  lin->add_option("--engine", lin_engine, "W-step truncation: svd | brp")->check(CLI::IsMember({"svd", "brp"}));

  CLI::App* syn = app.add_subcommand("synth", "Write a synthetic instance and its ground truth");
  add_io(syn);
  add_seed(syn);
  syn->add_option("--generator", cfg.generator, "godec | phase | lingodec")
      ->check(CLI::IsMember({"godec", "phase", "lingodec"}));
  syn->add_option("--n", cfg.n, "Size (items for lingodec)");
  syn->add_option("--m", cfg.m, "lingodec users (0 = n)");
  syn->add_option("--d", cfg.d, "lingodec features (0 = round(0.6 n))");
  syn->add_option("--rank", cfg.rank, "godec generator rank");
  syn->add_option("--card", cfg.card, "godec generator sparse cardinality");
  syn->add_option("--noise", cfg.noise, "Noise standard deviation");
  syn->add_option("--rho", cfg.rho, "Sparse density (phase, lingodec)");
  syn->add_option("--rank-ratio", cfg.rank_ratio, "r/n (phase, lingodec)");

  CLI::App* ph = app.add_subcommand("phase", "Phase-diagram sweep over (rho, r/n)");
  add_io(ph);
  add_seed(ph);
  ph->add_option("--solver", cfg.solver, "grebsmo | godec | lingodec")
      ->check(CLI::IsMember({"grebsmo", "godec", "lingodec"}));
  ph->add_option("--n", cfg.n, "Matrix size");
  ph->add_option("--trials", cfg.trials, "Trials per cell");
  ph->add_option("--grid", cfg.grid, "default | custom")->check(CLI::IsMember({"default", "custom"}));
  ph->add_option("--rho-grid", cfg.rho_grid, "Custom rho values")->delimiter(',');
  ph->add_option("--rank-grid", cfg.rank_grid, "Custom r/n values")->delimiter(',');
  ph->add_option("--workers", cfg.workers, "Worker threads");

  CLI::App* vid = app.add_subcommand("video-demo", "Background modeling on a synthetic moving-square video");
  add_io(vid);
  add_seed(vid);
  vid->add_option("--width", cfg.width, "Frame width");
  vid->add_option("--height", cfg.height, "Frame height");
  vid->add_option("--frames", cfg.frames, "Frame count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  if (dec->parsed()) cfg.command = Command::decompose;
  if (low->parsed()) cfg.command = Command::lowrank;
  if (lin->parsed()) cfg.command = Command::lingodec;
  if (syn->parsed()) cfg.command = Command::synth;
  if (ph->parsed()) cfg.command = Command::phase;
  if (vid->parsed()) cfg.command = Command::video_demo;
  if (lin->parsed()) {
    cfg.tolerance = lin_tol;
    cfg.engine = lin_engine;
  }

  try {
    cfg.input = input;
    cfg.z_input = z_input;
    cfg.truth_l = truth_l;
    cfg.truth_s = truth_s;
    cfg.truth_w = truth_w;
    cfg.out_dir = out_dir;
    cfg.out_format = parse_format(out_format);
    if (!in_format.empty()) cfg.in_format = parse_format(in_format);
    if (!std::isnan(lambda)) cfg.lambda = lambda;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return run(cfg);
}

}  // namespace godec
