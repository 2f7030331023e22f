// End-to-end tests of the command-line surface; each case drives the built
// binary through std::system and inspects exit codes and output files.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mscastle/csv.hpp"
#include "mscastle/io.hpp"
#include "mscastle/model.hpp"
#include "mscastle/solver.hpp"

namespace fs = std::filesystem;
using mscastle::Matrix;
using nlohmann::json;

namespace {

const std::string kBinary = MSCASTLE_CLI_PATH;

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args, const fs::path& scratch) {
  const fs::path log = scratch / "run.log";
  const std::string command =
      kBinary + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = WEXITSTATUS(status);
  std::ifstream in(log);
  result.output.assign((std::istreambuf_iterator<char>(in)), {});
  return result;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mscastle_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

json first_manifest_row(const fs::path& dir) {
  std::ifstream in(dir / "manifest.jsonl");
  REQUIRE(in.good());
  std::string line;
  REQUIRE(std::getline(in, line));
  return json::parse(line);
}

}  // namespace

TEST_CASE("simulate writes a dataset, ground truth and manifest") {
  const auto scratch = scratch_dir("simulate");
  const auto out = scratch / "run";
  const auto result = run_cli(
      "simulate --n 4 --t 200 --p 2 --replicates 1 --seed 7 --out " +
          out.string(),
      scratch);
  CHECK(result.exit_code == 0);

  const fs::path dataset = out / "t200_n4_p2_rep1";
  CHECK(fs::exists(dataset / "data.csv"));
  CHECK(fs::exists(dataset / "truth_s1_l0.csv"));
  CHECK(fs::exists(dataset / "truth_s1_l1.csv"));

  const json row = first_manifest_row(out);
  CHECK(row["command"] == "simulate");
  CHECK(row["seed"] == 7);
  CHECK(row.contains("duration_seconds"));

  // Second manifest line describes the dataset.
  std::ifstream in(out / "manifest.jsonl");
  std::string line;
  std::getline(in, line);
  REQUIRE(std::getline(in, line));
  const json entry = json::parse(line);
  CHECK(entry["n"] == 4);
  CHECK(entry["t"] == 200);

  fs::remove_all(scratch);
}

TEST_CASE("simulate is bytewise idempotent") {
  const auto scratch = scratch_dir("idempotent");
  const auto out_a = scratch / "a";
  const auto out_b = scratch / "b";
  const std::string flags = "simulate --n 3 --t 150 --p 1.5 --seed 11 --out ";
  CHECK(run_cli(flags + out_a.string(), scratch).exit_code == 0);
  CHECK(run_cli(flags + out_b.string(), scratch).exit_code == 0);

  const std::string tag = "t150_n3_p1.5_rep1";
  CHECK(mscastle::read_file(out_a / tag / "data.csv") ==
        mscastle::read_file(out_b / tag / "data.csv"));
  CHECK(mscastle::read_file(out_a / tag / "truth_s1_l0.csv") ==
        mscastle::read_file(out_b / tag / "truth_s1_l0.csv"));
  fs::remove_all(scratch);
}

TEST_CASE("the paper-ss grid preset expands to the four (N, s) cells") {
  const auto scratch = scratch_dir("grid_preset");
  const auto out = scratch / "grid";
  const auto result =
      run_cli("simulate --grid paper-ss --seed 3 --out " + out.string() +
                  " --jobs 2",
              scratch);
  CHECK(result.exit_code == 0);
  int rows = 0;
  std::ifstream in(out / "manifest.jsonl");
  std::string line;
  std::getline(in, line);  // run header
  std::vector<std::pair<int, double>> seen;
  while (std::getline(in, line)) {
    const json entry = json::parse(line);
    seen.emplace_back(entry["n"].get<int>(), entry["sparsity"].get<double>());
    ++rows;
  }
  CHECK(rows == 4);
  for (const auto& [n, s] : seen) {
    if (n == 10) CHECK(s == 0.80);
    if (n == 30) CHECK(s == 0.85);
    if (n == 50) CHECK(s == 0.90);
    if (n == 100) CHECK(s == 0.95);
  }
  fs::remove_all(scratch);
}

TEST_CASE("fit on an all-zero panel converges to an all-zero estimate") {
  const auto scratch = scratch_dir("fit_zero");
  mscastle::TimeSeriesPanel panel = mscastle::make_panel(Matrix::Zero(50, 3));
  mscastle::write_panel_csv(scratch / "zeros.csv", panel);

  const auto out = scratch / "fit";
  const auto result = run_cli("fit --input " + (scratch / "zeros.csv").string() +
                                  " --out " + out.string() +
                                  " --scales 1 --no-decompose --lambda 0.1",
                              scratch);
  CHECK(result.exit_code == 0);
  const auto z = mscastle::stack_from_csv_files(
      mscastle::stack_block_files(out, "Z"));
  CHECK(z.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(fs::exists(out / "edges.csv"));
  CHECK(fs::exists(out / "history.csv"));
  const json row = first_manifest_row(out);
  CHECK(row["convergence"]["converged"] == true);
  fs::remove_all(scratch);
}

TEST_CASE("fit then evaluate closes the loop against the ground truth") {
  const auto scratch = scratch_dir("fit_eval");
  const auto data_dir = scratch / "data";
  CHECK(run_cli("simulate --n 6 --t 800 --p 2 --sparsity 0.7 --seed 21 --out " +
                    data_dir.string(),
                scratch)
            .exit_code == 0);
  const fs::path dataset = data_dir / "t800_n6_p2_rep1";

  const auto fit_out = scratch / "fit";
  const auto fit_result =
      run_cli("fit --input " + (dataset / "data.csv").string() + " --out " +
                  fit_out.string() +
                  " --scales 1 --no-decompose --lags 1 --lambda 0.1",
              scratch);
  CHECK(fit_result.exit_code == 0);

  const auto eval_out = scratch / "scores";
  const auto eval_result =
      run_cli("evaluate --estimate " + fit_out.string() + " --truth " +
                  dataset.string() + " --out " + eval_out.string(),
              scratch);
  CHECK(eval_result.exit_code == 0);
  CHECK(eval_result.output.find("f1") != std::string::npos);
  CHECK(fs::exists(eval_out / "scores.csv"));

  // Evaluating the truth against itself is a perfect score.
  const auto self_result = run_cli(
      "evaluate --estimate " + dataset.string() + " --truth " + dataset.string(),
      scratch);
  CHECK(self_result.exit_code == 0);
  CHECK(self_result.output.find("1.0000") != std::string::npos);

  // Missing truth directory names the problem.
  const auto missing = run_cli(
      "evaluate --estimate " + fit_out.string() + " --truth /nonexistent/dir",
      scratch);
  CHECK(missing.exit_code == 1);
  CHECK(missing.output.find("nonexistent") != std::string::npos);
  fs::remove_all(scratch);
}

TEST_CASE("fit reruns are bytewise identical") {
  const auto scratch = scratch_dir("fit_rerun");
  const auto data_dir = scratch / "data";
  CHECK(run_cli("simulate --n 4 --t 300 --p 2 --seed 5 --out " +
                    data_dir.string(),
                scratch)
            .exit_code == 0);
  const fs::path input = data_dir / "t300_n4_p2_rep1" / "data.csv";

  const std::string flags = " --scales 1 --no-decompose --lambda 0.05";
  const auto out_a = scratch / "a";
  const auto out_b = scratch / "b";
  CHECK(run_cli("fit --input " + input.string() + " --out " + out_a.string() +
                    flags,
                scratch)
            .exit_code == 0);
  CHECK(run_cli("fit --input " + input.string() + " --out " + out_b.string() +
                    flags,
                scratch)
            .exit_code == 0);
  for (const char* name : {"Z_s1_l0.csv", "Z_s1_l1.csv", "W_s1_l0.csv",
                           "edges.csv", "history.csv"}) {
    CHECK(mscastle::read_file(out_a / name) == mscastle::read_file(out_b / name));
  }
  fs::remove_all(scratch);
}

TEST_CASE("malformed input is a usage error naming the line") {
  const auto scratch = scratch_dir("malformed");
  mscastle::atomic_write_file(scratch / "bad.csv", "time,a,b\n0,1.0,2.0\n1,,3\n");
  const auto result = run_cli("fit --input " + (scratch / "bad.csv").string() +
                                  " --out " + (scratch / "out").string() +
                                  " --no-decompose --lambda 0.1",
                              scratch);
  CHECK(result.exit_code == 1);
  CHECK(result.output.find("bad.csv:3") != std::string::npos);

  const auto combo = run_cli("fit --input " + (scratch / "bad.csv").string() +
                                 " --out " + (scratch / "out2").string() +
                                 " --scales 2 --no-decompose --lambda 0.1",
                             scratch);
  CHECK(combo.exit_code == 1);
  fs::remove_all(scratch);
}

TEST_CASE("decompose emits details, smooth and energy shares") {
  const auto scratch = scratch_dir("decompose");
  mscastle::TimeSeriesPanel panel =
      mscastle::make_panel(Matrix::Constant(64, 2, 1.5));
  panel.series_names = {"u", "v"};
  mscastle::write_panel_csv(scratch / "const.csv", panel);

  const auto out = scratch / "dec";
  const auto result =
      run_cli("decompose --input " + (scratch / "const.csv").string() +
                  " --out " + out.string() + " --scales 3 --wavelet haar",
              scratch);
  CHECK(result.exit_code == 0);

  const auto details = mscastle::read_panel_csv(out / "details.csv");
  CHECK(details.series_names[0] == "u@s1");
  CHECK(details.values.cwiseAbs().maxCoeff() <= 1e-14);
  const std::string energy = mscastle::read_file(out / "energy.csv");
  CHECK(energy.find("smooth") != std::string::npos);
  fs::remove_all(scratch);
}

TEST_CASE("config file values apply below command-line flags") {
  const auto scratch = scratch_dir("config");
  mscastle::TimeSeriesPanel panel = mscastle::make_panel(Matrix::Zero(40, 2));
  mscastle::write_panel_csv(scratch / "zeros.csv", panel);
  mscastle::atomic_write_file(scratch / "run.cfg",
                              "[fit]\nlambda = 0.25\nmax-iter = 150\n");

  const std::string base = "--config " + (scratch / "run.cfg").string() +
                           " fit --input " + (scratch / "zeros.csv").string() +
                           " --no-decompose";
  const auto out_a = scratch / "a";
  CHECK(run_cli(base + " --out " + out_a.string(), scratch).exit_code == 0);
  CHECK(first_manifest_row(out_a)["config"]["lambda"] == 0.25);
  CHECK(first_manifest_row(out_a)["config"]["max_iter"] == 150);

  const auto out_b = scratch / "b";
  CHECK(run_cli(base + " --lambda 0.5 --out " + out_b.string(), scratch)
            .exit_code == 0);
  CHECK(first_manifest_row(out_b)["config"]["lambda"] == 0.5);
  fs::remove_all(scratch);
}

TEST_CASE("sweep emits ratio and persistence tables") {
  const auto scratch = scratch_dir("sweep");
  const auto data_dir = scratch / "data";
  CHECK(run_cli("simulate --n 4 --t 400 --p 2 --sparsity 0.6 --seed 13 --out " +
                    data_dir.string(),
                scratch)
            .exit_code == 0);
  const fs::path input = data_dir / "t400_n4_p2_rep1" / "data.csv";

  const auto out = scratch / "sweep";
  const auto result = run_cli(
      "sweep --input " + input.string() + " --out " + out.string() +
          " --scales 1 --no-decompose --lambda-lo 0.01 --lambda-hi 0.1 --k 4" +
          " --cbar 0.01,0.05 --jobs 2",
      scratch);
  CHECK((result.exit_code == 0 || result.exit_code == 2));

  const std::string ratios = mscastle::read_file(out / "ratios.csv");
  CHECK(std::count(ratios.begin(), ratios.end(), '\n') == 5);  // header + 4
  CHECK(fs::exists(out / "persistence_c0.01.csv"));
  CHECK(fs::exists(out / "persistence_c0.05.csv"));
  CHECK(fs::exists(out / "persistent_edges_c0.01.csv"));
  CHECK(fs::exists(out / "lambda_1.csv"));
  CHECK(fs::exists(out / "lambda_4.csv"));
  fs::remove_all(scratch);
}

TEST_CASE("unknown flags and missing subcommand are usage errors") {
  const auto scratch = scratch_dir("usage");
  CHECK(run_cli("fit --nonsense", scratch).exit_code != 0);
  CHECK(run_cli("", scratch).exit_code != 0);
  fs::remove_all(scratch);
}
