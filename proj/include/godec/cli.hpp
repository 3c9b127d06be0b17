#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "godec/io.hpp"

namespace godec {

enum class Command { decompose, lowrank, lingodec, synth, phase, video_demo };

// Exit codes of `run`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNotConverged = 1;
inline constexpr int kExitInputError = 2;

struct RunConfig {
  Command command = Command::decompose;

  std::filesystem::path input;    // X
  std::filesystem::path z_input;  // lingodec item features
  std::filesystem::path truth_l;  // optional ground truth for metrics
  std::filesystem::path truth_s;
  std::filesystem::path truth_w;
  std::optional<MatrixFormat> in_format;  // default: from the file extension
  std::filesystem::path out_dir = ".";
  MatrixFormat out_format = MatrixFormat::csv;
  bool transpose = false;  // solve on Xᵀ (frames as columns), write results back in input orientation

  // Solvers. engine: godec-brp | godec-naive | grebsmo (decompose), svd | brp (lingodec).
  std::string engine = "godec-brp";
  std::size_t rank = 1;
  std::size_t card = 0;
  double eps = 1e-7;
  std::size_t power = 2;
  std::size_t oversampling = 0;
  bool refine = true;
  std::size_t max_iters = 100;
  std::optional<double> lambda;
  double tolerance = 1e-3;
  std::size_t rank_step = 1;
  std::size_t inner_iters = 3;
  std::size_t max_rank = 0;
  std::string directions = "exact";  // exact | random
  std::uint64_t seed = 0;

  // synth
  std::string generator = "godec";  // godec | phase | lingodec
  std::size_t n = 100;
  std::size_t m = 0;  // lingodec users, 0 means n
  std::size_t d = 0;  // lingodec features, 0 means round(0.6 n)
  double noise = 1e-3;
  double rho = 0.05;
  double rank_ratio = 0.05;

  // phase
  std::string solver = "grebsmo";
  std::size_t trials = 5;
  std::string grid = "default";
  std::vector<double> rho_grid;
  std::vector<double> rank_grid;
  std::size_t workers = 1;

  // video-demo
  std::size_t width = 32;
  std::size_t height = 24;
  std::size_t frames = 20;
};

// Executes one command. Diagnostics go to stderr; returns kExitOk,
// kExitNotConverged (artifacts still written) or kExitInputError.
int run(const RunConfig& cfg);

// Parses flags (and an optional --config file, overridden by flags) into a
// RunConfig and runs it.
int run_cli(int argc, const char* const* argv);

}  // namespace godec
