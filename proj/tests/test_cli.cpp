#include "support.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string command = std::string(SACRC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path make_dataset(const fs::path& dir) {
  const fs::path csv = dir / "data.csv";
  REQUIRE(run("synth --seed 3 --classes 4 --per-class 10 --dim 15 --subspace-dim 3 --overlap 0.3 --out " +
              csv.string() + " --manifest " + (dir / "data.json").string()) == 0);
  return csv;
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(run("") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("eval --dataset nowhere.csv") == 1);  // --seed is required
  CHECK(run("sweep --dataset nowhere.csv") == 1);
  CHECK(run("synth --out x.csv") == 1);
}

TEST_CASE("data errors exit with 2") {
  const fs::path dir = sacrc::testing::scratch_dir("cli_data");
  CHECK(run("eval --seed 0 --dataset " + (dir / "missing.csv").string()) == 2);
  std::ofstream(dir / "bad.csv") << "label,f0\na,zz\n";
  CHECK(run("eval --seed 0 --dataset " + (dir / "bad.csv").string()) == 2);
}

TEST_CASE("numerical errors exit with 3") {
  const fs::path dir = sacrc::testing::scratch_dir("cli_numeric");
  const fs::path csv = make_dataset(dir);
  // 4 classes x 8 atoms = 32 atoms in 15 dimensions, unregularized.
  CHECK(run("eval --seed 0 --lambda 0 --k 2 --train 8 --trials 1 --dataset " + csv.string() + " --out " +
            (dir / "out").string()) == 3);
}

TEST_CASE("eval and sweep reruns are byte identical") {
  const fs::path dir = sacrc::testing::scratch_dir("cli_repeat");
  make_dataset(dir);
  const std::string common = " --seed 5 --k 3 --lambda 0.01 --train 5 --trials 3 --dataset " +
                             (dir / "data.json").string();
  REQUIRE(run("eval" + common + " --delta-grid 1e-4:1e-1:4 --trace-sample 0 --out " + (dir / "a").string()) == 0);
  REQUIRE(run("eval" + common + " --delta-grid 1e-4:1e-1:4 --trace-sample 0 --threads 2 --out " +
              (dir / "b").string()) == 0);
  for (const char* name : {"report.json", "report.txt", "sparsity_curves.csv", "coefficient_trace.csv"}) {
    CHECK_MESSAGE(slurp(dir / "a" / name) == slurp(dir / "b" / name), name);
    CHECK_FALSE(slurp(dir / "a" / name).empty());
  }
  CHECK(fs::exists(dir / "a" / "timing.json"));

  const std::string grids = " --lambda-grid 0.001,0.01,0.1 --k-grid 1,2,3";
  REQUIRE(run("sweep" + common + grids + " --out " + (dir / "c").string()) == 0);
  REQUIRE(run("sweep" + common + grids + " --out " + (dir / "d").string()) == 0);
  CHECK(slurp(dir / "c" / "sweep.json") == slurp(dir / "d" / "sweep.json"));
  CHECK(slurp(dir / "c" / "sweep.csv").rfind("stage,lambda,k,accuracy\n", 0) == 0);
}

TEST_CASE("fit, bench and analyze write their outputs") {
  const fs::path dir = sacrc::testing::scratch_dir("cli_misc");
  const fs::path csv = make_dataset(dir);
  CHECK(run("fit --k 3 --lambda 0.01 --dataset " + csv.string() + " --out " + (dir / "fit").string()) == 0);
  CHECK(fs::exists(dir / "fit" / "model.json"));
  CHECK(run("bench --seed 1 --k 3 --train 5 --repetitions 2 --classifiers sa-crc,crc-rls --dataset " +
            csv.string() + " --out " + (dir / "bench").string()) == 0);
  CHECK(fs::exists(dir / "bench" / "bench.json"));
  CHECK(run("analyze --tie-scenario --m 5 --seed 2 --out " + (dir / "tie").string()) == 0);
  CHECK(slurp(dir / "tie" / "analysis.json").find("one_atom") != std::string::npos);
}
