#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef LRSENSE_CLI_PATH
#error "LRSENSE_CLI_PATH must point at the built binary"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const auto out_path = fs::temp_directory_path() / "lrsense_cli_out.txt";
  const std::string cmd = std::string(LRSENSE_CLI_PATH) + " " + args + " > " +
                          out_path.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  fs::remove(out_path);
  return {WEXITSTATUS(status), buf.str()};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with code 1") {
  CHECK(run_cli("").exit_code == 1);
  CHECK(run_cli("--bogus").exit_code == 1);
  CHECK(run_cli("frobnicate").exit_code == 1);
  CHECK(run_cli("rip-probe --m 4").exit_code == 1);  // missing required flags
  CHECK(run_cli("packing --m 8 --k 2 --q nope --epsilon 0.1 --max-card 5 --seed 1")
            .exit_code == 1);
}

TEST_CASE("missing experiment config exits 1 without output") {
  const auto result = run_cli("experiment --config definitely_missing.json");
  CHECK(result.exit_code == 1);
  CHECK_FALSE(fs::exists("trials.csv"));
}

TEST_CASE("help exits cleanly") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("solve --help").exit_code == 0);
}

TEST_CASE("probe subcommands print their estimates") {
  const auto rip =
      run_cli("rip-probe --kind gaussian --m 8 --n 400 --r 1 --samples 10 "
              "--ascent 3 --seed 7");
  CHECK(rip.exit_code == 0);
  CHECK(rip.output.find("delta_hat = ") != std::string::npos);

  const auto noise =
      run_cli("noise-probe --kind gaussian --m 6 --n 200 --sigma 0.01 "
              "--trials 4 --seed 3");
  CHECK(noise.exit_code == 0);
  CHECK(noise.output.find("median = ") != std::string::npos);
}

TEST_CASE("packing and minimax subcommands report their summaries") {
  const auto packing =
      run_cli("packing --m 8 --k 2 --q 2 --epsilon 0.1 --max-card 10 --seed 1");
  CHECK(packing.exit_code == 0);
  CHECK(packing.output.find("cardinality = 10") != std::string::npos);

  const auto bad = run_cli("packing --m 6 --k 4 --q 2 --epsilon 0.1 --max-card 5 --seed 1");
  CHECK(bad.exit_code == 1);  // k > m - k is a domain error

  const auto json_path = fs::temp_directory_path() / "lrsense_cli_minimax.json";
  const auto mm = run_cli("minimax --m 10 --r 2 --n 1000 --sigma 1 --cprime 0.05 "
                          "--seed 3 --json " + json_path.string());
  CHECK(mm.exit_code == 0);
  CHECK(mm.output.find("kl_condition_met = true") != std::string::npos);
  CHECK(fs::exists(json_path));
  fs::remove(json_path);
}

TEST_CASE("dataset and solve subcommands round-trip through files") {
  const auto dir = fs::temp_directory_path() / "lrsense_cli_solve";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string ds_path = (dir / "ds.bin").string();
  const std::string est_path = (dir / "estimate.bin").string();
  const std::string json_path = (dir / "result.json").string();

  const auto gen = run_cli("dataset --kind gaussian --m 6 --r 1 --n 120 --sigma 0 "
                           "--seed 11 --out " + ds_path);
  CHECK(gen.exit_code == 0);
  REQUIRE(fs::exists(ds_path));

  const auto solve = run_cli("solve --dataset " + ds_path +
                             " --lambda 1e-8 --json " + json_path +
                             " --estimate " + est_path);
  CHECK(solve.exit_code == 0);
  CHECK(solve.output.find("converged = true") != std::string::npos);
  CHECK(fs::exists(est_path));
  CHECK(fs::exists(json_path));

  const auto missing = run_cli("solve --dataset " + ds_path + "_nope --lambda 1");
  CHECK(missing.exit_code == 2);  // runtime I/O failure
  fs::remove_all(dir);
}

}  // TEST_SUITE
