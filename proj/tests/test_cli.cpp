#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "godec/io.hpp"
#include "godec/matcore.hpp"
#include "godec/synthlab.hpp"
#include "support.hpp"

using namespace godec;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("godec_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GODEC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json metrics(const fs::path& dir) { return json::parse(read_file(dir / "metrics.json")); }

std::string str(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST(Cli, DecomposeRecoversPlantedInstance) {
  const fs::path dir = scratch("decompose");
  ASSERT_EQ(run_cli("synth --generator godec --n 60 --rank 3 --card 180 --noise 0 --seed 2 --out " + str(dir / "in")), 0);
  ASSERT_TRUE(fs::exists(dir / "in" / "x.csv"));
  ASSERT_TRUE(fs::exists(dir / "in" / "instance.json"));
  const int code = run_cli("decompose --in " + str(dir / "in" / "x.csv") + " --truth-l " +
                           str(dir / "in" / "l_true.csv") + " --truth-s " + str(dir / "in" / "s_true.csv") +
                           " --engine godec-brp --rank 3 --card 180 --eps 1e-10 --seed 3 --out " + str(dir / "out"));
  EXPECT_EQ(code, 0);
  const json m = metrics(dir / "out");
  EXPECT_LE(m["rel_error_x"].get<double>(), 1e-10);
  EXPECT_LE(m["rel_error_l"].get<double>(), 1e-8);
  EXPECT_TRUE(m["converged"].get<bool>());
  EXPECT_EQ(m["effective_rank"].get<int>(), 3);
  for (const char* key : {"rel_error_x", "rel_error_l", "rel_error_s", "iterations", "wall_seconds",
                          "effective_rank", "converged"}) {
    EXPECT_TRUE(m.contains(key)) << key;
  }
  EXPECT_TRUE(fs::exists(dir / "out" / "L.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "S.csv"));
}

TEST(Cli, NonConvergenceExitsOne) {
  const fs::path dir = scratch("noconv");
  save_matrix(dir / "x.csv", test::randn(30, 30, 1), MatrixFormat::csv);
  EXPECT_EQ(run_cli("decompose --in " + str(dir / "x.csv") + " --rank 2 --card 5 --max-iters 3 --out " +
                    str(dir / "out")),
            1);
  EXPECT_FALSE(metrics(dir / "out")["converged"].get<bool>());
}

TEST(Cli, InputErrorsExitTwo) {
  const fs::path dir = scratch("errors");
  EXPECT_EQ(run_cli("decompose --in " + str(dir / "missing.csv") + " --out " + str(dir)), 2);
  std::ofstream(dir / "bad.csv") << "1,2\n3\n";
  EXPECT_EQ(run_cli("decompose --in " + str(dir / "bad.csv") + " --out " + str(dir)), 2);
  save_matrix(dir / "x.csv", test::randn(5, 5, 1), MatrixFormat::csv);
  EXPECT_EQ(run_cli("decompose --in " + str(dir / "x.csv") + " --rank 9 --out " + str(dir)), 2);
  EXPECT_EQ(run_cli("decompose --in " + str(dir / "x.csv") + " --engine nope --out " + str(dir)), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli(""), 2);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const fs::path dir = scratch("config");
  save_matrix(dir / "x.csv", matmul(test::randn(20, 2, 1), test::randn(2, 20, 2)), MatrixFormat::csv);
  std::ofstream(dir / "run.toml") << "[decompose]\nrank = 1\ncard = 0\nengine = \"godec-naive\"\nmax-iters = 2\n";
  // Rank 1 from the file cannot fit a rank-2 input.
  EXPECT_EQ(run_cli("--config " + str(dir / "run.toml") + " decompose --in " + str(dir / "x.csv") + " --out " +
                    str(dir / "a")),
            1);
  // The flag wins over the file.
  EXPECT_EQ(run_cli("--config " + str(dir / "run.toml") + " decompose --in " + str(dir / "x.csv") +
                    " --rank 2 --out " + str(dir / "b")),
            0);
}

TEST(Cli, SameSeedGivesIdenticalBytes) {
  const fs::path dir = scratch("determinism");
  ASSERT_EQ(run_cli("synth --generator godec --n 40 --rank 2 --card 50 --noise 0.01 --seed 9 --out-format f64le --out " +
                    str(dir / "in")),
            0);
  for (const char* out : {"a", "b"}) {
    run_cli("decompose --in " + str(dir / "in" / "x.f64le") + " --rank 2 --card 50 --eps 1e-6 --seed 4 " +
            "--out-format f64le --out " + str(dir / out));
  }
  EXPECT_EQ(read_file(dir / "a" / "L.f64le"), read_file(dir / "b" / "L.f64le"));
  EXPECT_EQ(read_file(dir / "a" / "S.f64le"), read_file(dir / "b" / "S.f64le"));
}

TEST(Cli, TransposeWritesOriginalOrientation) {
  const fs::path dir = scratch("transpose");
  save_matrix(dir / "x.csv", matmul(test::randn(12, 2, 1), test::randn(2, 30, 2)), MatrixFormat::csv);
  EXPECT_EQ(run_cli("decompose --in " + str(dir / "x.csv") + " --rank 2 --card 0 --transpose --out " +
                    str(dir / "out")),
            0);
  const DenseMatrix l = load_matrix(dir / "out" / "L.csv", MatrixFormat::csv);
  EXPECT_EQ(l.rows(), 12u);
  EXPECT_EQ(l.cols(), 30u);
}

TEST(Cli, LowrankAndLingodec) {
  const fs::path dir = scratch("lowlin");
  save_matrix(dir / "x.csv", matmul(test::randn(15, 3, 1), test::randn(3, 12, 2)), MatrixFormat::csv);
  EXPECT_EQ(run_cli("lowrank --in " + str(dir / "x.csv") + " --rank 3 --q 1 --out " + str(dir / "low")), 0);
  EXPECT_LE(metrics(dir / "low")["rel_error_x"].get<double>(), 1e-16);

  ASSERT_EQ(run_cli("synth --generator lingodec --n 40 --m 50 --rank-ratio 0.1 --rho 0.05 --seed 5 --out " +
                    str(dir / "lin_in")),
            0);
  EXPECT_EQ(run_cli("lingodec --in " + str(dir / "lin_in" / "x.csv") + " --z " + str(dir / "lin_in" / "z.csv") +
                    " --truth-w " + str(dir / "lin_in" / "w_true.csv") + " --rank 4 --lambda 0.015 --tol 1e-9" +
                    " --max-iters 300 --out " + str(dir / "lin")),
            0);
  const json m = metrics(dir / "lin");
  EXPECT_TRUE(m.contains("rel_error_w"));
  EXPECT_TRUE(fs::exists(dir / "lin" / "W.csv"));
}

TEST(Cli, PhaseWritesOneRowPerCell) {
  const fs::path dir = scratch("phase");
  ASSERT_EQ(run_cli("phase --solver godec --n 30 --trials 1 --grid custom --rho-grid 0.02,0.1 --rank-grid 0.05,0.1,0.2"
                    " --out " + str(dir)),
            0);
  std::istringstream in(read_file(dir / "phase.csv"));
  std::string line;
  std::size_t rows = 0;
  std::getline(in, line);
  EXPECT_EQ(line, "rho,rank_ratio,trials,successes,rate");
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 6u);
}

TEST(Cli, VideoDemo) {
  const fs::path dir = scratch("video");
  EXPECT_EQ(run_cli("video-demo --seed 1 --out " + str(dir)), 0);
  const json m = metrics(dir);
  EXPECT_GE(m["min_jaccard"].get<double>(), 0.9);
  EXPECT_TRUE(fs::exists(dir / "background" / "frame_0000.pgm"));
  EXPECT_TRUE(fs::exists(dir / "foreground" / "frame_0019.pgm"));
}
