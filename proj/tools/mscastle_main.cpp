// Command-line front end: simulate, decompose, fit, sweep, evaluate.
//
// Exit codes: 0 success, 1 input or usage error, 2 completed but not
// converged. Every command writes a manifest.jsonl into its output
// directory; result files are written atomically and are bytewise
// reproducible for identical flags and seed.

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mscastle/csv.hpp"
#include "mscastle/errors.hpp"
#include "mscastle/eval.hpp"
#include "mscastle/io.hpp"
#include "mscastle/persistence.hpp"
#include "mscastle/solver.hpp"
#include "mscastle/synth.hpp"
#include "mscastle/wavelet.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

struct RunManifest {
  std::string command;
  json config = json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  json convergence = json::object();
  std::vector<std::string> extra_rows;  // e.g. one row per dataset
  std::chrono::steady_clock::time_point started =
      std::chrono::steady_clock::now();

  void write(const fs::path& out_dir) const {
    const double duration =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
            .count();
    json row;
    row["type"] = "run";
    row["command"] = command;
    row["config"] = config;
    row["inputs"] = inputs;
    row["outputs"] = outputs;
    row["seed"] = seed;
    row["duration_seconds"] = duration;
    if (!convergence.empty()) row["convergence"] = convergence;
    std::string text = row.dump() + "\n";
    for (const auto& extra : extra_rows) text += extra + "\n";
    mscastle::atomic_write_file(out_dir / "manifest.jsonl", text);
  }
};

struct SolverFlags {
  mscastle::SolverConfig config;

  void attach(CLI::App* cmd) {
    cmd->add_option("--lambda", config.lambda, "Sparsity weight");
    cmd->add_option("--rho", config.rho, "Quadratic penalty");
    cmd->add_option("--gamma0", config.gamma0, "Initial acyclicity dual step");
    cmd->add_option("--gamma-max", config.gamma_max, "Dual step cap");
    cmd->add_option("--ratio-r", config.ratio_r,
                    "Escalate gamma when h_{k+1}/h_k exceeds this");
    cmd->add_option("--tol-h", config.tol_h, "Acyclicity tolerance");
    cmd->add_option("--tol-primal", config.tol_primal,
                    "Tolerance on ||w - z||");
    cmd->add_option("--max-iter", config.max_iter, "Outer iteration cap");
    cmd->add_option("--inner-tol", config.inner_tol,
                    "Gradient tolerance of the quadratic subproblem");
    cmd->add_option("--inner-max-iter", config.inner_max_iter,
                    "Inner iteration cap");
    cmd->add_option("--seed", config.seed, "Run seed");
  }

  json to_json() const {
    json j;
    j["lambda"] = config.lambda;
    j["rho"] = config.rho;
    j["gamma0"] = config.gamma0;
    j["gamma_max"] = config.gamma_max;
    j["ratio_r"] = config.ratio_r;
    j["tol_h"] = config.tol_h;
    j["tol_primal"] = config.tol_primal;
    j["max_iter"] = config.max_iter;
    j["inner_tol"] = config.inner_tol;
    j["inner_max_iter"] = config.inner_max_iter;
    j["seed"] = config.seed;
    return j;
  }
};

void center_columns(mscastle::Matrix& values) {
  values.rowwise() -= values.colwise().mean();
}

std::string history_csv(const mscastle::SolverState& state) {
  std::string out = "iter,h,objective,gamma\n";
  for (size_t k = 0; k < state.h_history.size(); ++k) {
    out += std::to_string(k + 1) + "," +
           mscastle::format_double(state.h_history[k]) + "," +
           mscastle::format_double(state.objective_history[k]) + "," +
           mscastle::format_double(state.gamma_history[k]) + "\n";
  }
  return out;
}

json convergence_json(const mscastle::SolverState& state) {
  json j;
  j["converged"] = state.converged;
  j["iterations"] = state.iterations;
  j["h"] = state.h_final;
  j["primal_residual"] = state.primal_residual;
  j["dual_residual"] = state.dual_residual;
  j["fit_loss"] = state.fit_loss;
  j["reg_loss"] = state.reg_loss;
  j["alpha"] = state.alpha;
  j["gamma"] = state.gamma_final;
  return j;
}

std::string scores_csv(const mscastle::StackScore& scores) {
  std::string out =
      "scale,lag,shd,extra,missing,reverse,precision,recall,f1\n";
  const auto row = [&](const std::string& scale, const std::string& lag,
                       const mscastle::StructureScore& s) {
    out += scale + "," + lag + "," + std::to_string(s.shd) + "," +
           std::to_string(s.extra) + "," + std::to_string(s.missing) + "," +
           std::to_string(s.reverse) + "," + mscastle::format_double(s.precision) +
           "," + mscastle::format_double(s.recall) + "," +
           mscastle::format_double(s.f1) + "\n";
  };
  for (size_t b = 0; b < scores.per_block.size(); ++b) {
    row(std::to_string(scores.block_scale[b]),
        std::to_string(scores.block_lag[b]), scores.per_block[b]);
  }
  row("all", "all", scores.aggregate);
  return out;
}

std::string ratios_csv(const mscastle::SweepResult& sweep) {
  std::string out = "lambda,ratio,fit_loss,reg_loss,converged\n";
  for (size_t k = 0; k < sweep.lambdas.size(); ++k) {
    out += mscastle::format_double(sweep.lambdas[k]) + "," +
           mscastle::format_double(sweep.ratios[k]) + "," +
           mscastle::format_double(sweep.fit_losses[k]) + "," +
           mscastle::format_double(sweep.reg_losses[k]) + "," +
           (sweep.converged[k] ? "1" : "0") + "\n";
  }
  return out;
}

std::string persistence_csv(const mscastle::PersistenceReport& report,
                            const std::vector<std::string>& names) {
  const auto& pattern = report.pattern;
  const int n = pattern.series_per_scale;
  const long nbar = pattern.cols();
  std::string out = "scale,lag,source,target,p,sign_stable,highly_persistent\n";
  for (int scale = 1; scale <= pattern.scales; ++scale) {
    for (int lag = 0; lag <= pattern.lags; ++lag) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const long r = static_cast<long>(lag) * nbar + (scale - 1) * n + i;
          const long c = static_cast<long>(scale - 1) * n + j;
          if (!pattern.mask(r, c)) continue;
          out += std::to_string(scale) + "," + std::to_string(lag) + "," +
                 names[static_cast<size_t>(i)] + "," +
                 names[static_cast<size_t>(j)] + "," +
                 mscastle::format_double(report.scores(r, c)) + "," +
                 (report.sign_stable(r, c) ? "1" : "0") + "," +
                 (report.highly_persistent(r, c) ? "1" : "0") + "\n";
        }
      }
    }
  }
  return out;
}

std::string format_compact(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", value);
  return buf;
}

// Data preparation shared by fit and sweep: read the panel, optionally
// center, optionally decompose, and build the lagged design plus pattern.
struct PreparedData {
  mscastle::TimeSeriesPanel panel;
  std::optional<mscastle::ScaleAugmentedPanel> augmented;
  mscastle::LaggedDesign design;
  mscastle::StackedPattern pattern;
  std::vector<std::string> series_names;
};

PreparedData prepare(const std::string& input, int lags, int scales,
                     const std::string& wavelet, bool no_decompose,
                     bool center) {
  PreparedData data;
  data.panel = mscastle::read_panel_csv(input);
  if (center) center_columns(data.panel.values);
  const int n = static_cast<int>(data.panel.cols());
  data.series_names = data.panel.series_names;
  if (no_decompose) {
    if (scales != 1) {
      throw std::invalid_argument("--no-decompose requires --scales 1");
    }
    data.design = mscastle::build_design(data.panel, lags);
    data.pattern = mscastle::pattern_for(lags, 1, n);
  } else {
    data.augmented = mscastle::swt_decompose(data.panel, scales,
                                             mscastle::filter_bank(wavelet));
    data.design = mscastle::build_design(*data.augmented, lags);
    data.pattern = mscastle::pattern_for(lags, scales, n);
  }
  return data;
}

std::vector<fs::path> find_stack_files(const fs::path& dir,
                                       const std::vector<std::string>& prefixes) {
  for (const auto& prefix : prefixes) {
    const auto files = mscastle::stack_block_files(dir, prefix);
    if (!files.empty()) return files;
  }
  return {};
}

int cmd_simulate(const std::string& out, const std::string& grid, int n, long t,
                 double p, int replicates, int lags, std::uint64_t seed,
                 std::optional<double> sparsity, int jobs) {
  RunManifest manifest;
  manifest.command = "simulate";
  manifest.seed = seed;

  mscastle::GridSpec spec;
  spec.replicates = replicates;
  spec.lags = lags;
  spec.master_seed = seed;
  spec.sparsity_override = sparsity;
  if (grid == "paper-ss") {
    spec.t_values = {1000};
    spec.n_values = {10, 30, 50, 100};
    spec.p_values = {2.0};
  } else if (grid == "paper-pgnd") {
    spec.t_values = {100, 500, 1000};
    spec.n_values = {10, 30, 50};
    spec.p_values = {1.0, 1.5, 2.0, 2.5, 100.0};
  } else if (!grid.empty()) {
    throw std::invalid_argument("unknown grid preset: " + grid);
  } else {
    spec.t_values = {t};
    spec.n_values = {n};
    spec.p_values = {p};
  }

  manifest.config["grid"] = grid;
  manifest.config["replicates"] = replicates;
  manifest.config["lags"] = lags;
  if (sparsity) manifest.config["sparsity"] = *sparsity;

  const fs::path out_dir(out);
  const auto entries = mscastle::experiment_grid(spec, out_dir, jobs);
  for (const auto& entry : entries) {
    manifest.outputs.push_back(entry.data_path);
    manifest.extra_rows.push_back(mscastle::grid_entry_json(entry));
  }
  manifest.write(out_dir);
  std::cout << "wrote " << entries.size() << " dataset(s) under " << out
            << "\n";
  return kExitOk;
}

int cmd_decompose(const std::string& input, const std::string& out, int scales,
                  const std::string& wavelet, bool center) {
  RunManifest manifest;
  manifest.command = "decompose";
  manifest.inputs = {input};
  manifest.config["scales"] = scales;
  manifest.config["wavelet"] = wavelet;
  manifest.config["center"] = center;

  mscastle::TimeSeriesPanel panel = mscastle::read_panel_csv(input);
  if (center) center_columns(panel.values);
  const auto aug =
      mscastle::swt_decompose(panel, scales, mscastle::filter_bank(wavelet));
  const mscastle::Matrix shares = mscastle::variance_partition(aug, panel);

  const fs::path out_dir(out);
  fs::create_directories(out_dir);
  mscastle::atomic_write_file(out_dir / "details.csv",
                              mscastle::augmented_to_csv(aug, panel.timestamps));
  mscastle::atomic_write_file(out_dir / "smooth.csv",
                              mscastle::smooth_to_csv(aug, panel.timestamps));
  mscastle::atomic_write_file(
      out_dir / "energy.csv",
      mscastle::energy_shares_to_csv(shares, panel.series_names));

  // Cross-scale correlation diagnostic (details of different scales are
  // nearly, not exactly, orthogonal).
  std::string corr_csv = "series,scale_a,scale_b,correlation\n";
  for (long i = 0; i < panel.cols(); ++i) {
    const mscastle::Matrix corr = mscastle::scale_correlation_matrix(aug, i);
    for (int a = 1; a <= scales; ++a) {
      for (int b = a + 1; b <= scales; ++b) {
        corr_csv += panel.series_names[static_cast<size_t>(i)] + "," +
                    std::to_string(a) + "," + std::to_string(b) + "," +
                    mscastle::format_double(corr(a - 1, b - 1)) + "\n";
      }
    }
  }
  mscastle::atomic_write_file(out_dir / "scale_correlations.csv", corr_csv);

  for (const char* name : {"details.csv", "smooth.csv", "energy.csv",
                           "scale_correlations.csv"}) {
    manifest.outputs.push_back((out_dir / name).string());
  }
  manifest.write(out_dir);
  return kExitOk;
}

int cmd_fit(const std::string& input, const std::string& out, int lags,
            int scales, const std::string& wavelet, bool no_decompose,
            bool center, double edge_threshold, const SolverFlags& flags) {
  RunManifest manifest;
  manifest.command = "fit";
  manifest.inputs = {input};
  manifest.seed = flags.config.seed;
  manifest.config = flags.to_json();
  manifest.config["lags"] = lags;
  manifest.config["scales"] = scales;
  manifest.config["wavelet"] = wavelet;
  manifest.config["no_decompose"] = no_decompose;
  manifest.config["center"] = center;
  manifest.config["edge_threshold"] = edge_threshold;

  const PreparedData data =
      prepare(input, lags, scales, wavelet, no_decompose, center);
  const mscastle::SolverState state =
      mscastle::fit(data.design, data.pattern, flags.config);
  const mscastle::CausalGraphEstimate graph =
      mscastle::to_graph(state.z, edge_threshold);

  const fs::path out_dir(out);
  fs::create_directories(out_dir);
  for (const auto& path : mscastle::write_stack_blocks(out_dir, "Z", state.z,
                                                       data.series_names)) {
    manifest.outputs.push_back(path.string());
  }
  for (const auto& path : mscastle::write_stack_blocks(out_dir, "W", state.w,
                                                       data.series_names)) {
    manifest.outputs.push_back(path.string());
  }
  mscastle::atomic_write_file(out_dir / "edges.csv",
                              mscastle::edges_to_csv(graph, data.series_names));
  mscastle::atomic_write_file(out_dir / "history.csv", history_csv(state));
  manifest.outputs.push_back((out_dir / "edges.csv").string());
  manifest.outputs.push_back((out_dir / "history.csv").string());
  manifest.convergence = convergence_json(state);
  manifest.write(out_dir);

  std::cout << (state.converged ? "converged" : "NOT converged") << " after "
            << state.iterations << " iteration(s); h = " << state.h_final
            << ", fit loss = " << state.fit_loss
            << ", edges = " << graph.edges.size() << "\n";
  return state.converged ? kExitOk : kExitNotConverged;
}

int cmd_sweep(const std::string& input, const std::string& out, int lags,
              int scales, const std::string& wavelet, bool no_decompose,
              bool center, double lambda_lo, double lambda_hi, int k,
              const std::vector<double>& cbars, bool auto_range,
              double probe_lo, double probe_hi, int probe_count,
              bool strict_signs, double persistence_threshold,
              const SolverFlags& flags, int jobs) {
  RunManifest manifest;
  manifest.command = "sweep";
  manifest.inputs = {input};
  manifest.seed = flags.config.seed;
  manifest.config = flags.to_json();
  manifest.config["lags"] = lags;
  manifest.config["scales"] = scales;
  manifest.config["wavelet"] = wavelet;
  manifest.config["no_decompose"] = no_decompose;
  manifest.config["center"] = center;
  manifest.config["k"] = k;
  manifest.config["cbar"] = cbars;
  manifest.config["auto_range"] = auto_range;
  manifest.config["strict_signs"] = strict_signs;
  manifest.config["persistence_threshold"] = persistence_threshold;

  const PreparedData data =
      prepare(input, lags, scales, wavelet, no_decompose, center);

  if (auto_range) {
    const auto probes = mscastle::log_spaced(probe_lo, probe_hi, probe_count);
    const auto [lo, hi] = mscastle::select_lambda_range(
        data.design, data.pattern, flags.config, probes, jobs);
    lambda_lo = lo;
    lambda_hi = hi;
    std::cout << "auto-selected lambda range [" << lo << ", " << hi << "]\n";
  }
  manifest.config["lambda_lo"] = lambda_lo;
  manifest.config["lambda_hi"] = lambda_hi;

  const auto lambdas = mscastle::log_spaced(lambda_lo, lambda_hi, k);
  const mscastle::SweepResult sweep_result =
      mscastle::sweep(data.design, data.pattern, flags.config, lambdas, jobs);

  const long total = static_cast<long>(sweep_result.lambdas.size());
  const long ok = sweep_result.converged_count();
  if (ok < total) {
    std::cerr << "warning: " << (total - ok) << " of " << total
              << " runs did not converge; they are excluded from persistence\n";
  }

  const fs::path out_dir(out);
  fs::create_directories(out_dir);
  mscastle::atomic_write_file(out_dir / "ratios.csv", ratios_csv(sweep_result));
  manifest.outputs.push_back((out_dir / "ratios.csv").string());
  for (size_t i = 0; i < sweep_result.coefficients.size(); ++i) {
    const fs::path path =
        out_dir / ("lambda_" + std::to_string(i + 1) + ".csv");
    mscastle::write_stack_csv(path, sweep_result.coefficients[i],
                              data.series_names);
    manifest.outputs.push_back(path.string());
  }

  for (double cbar : cbars) {
    const mscastle::PersistenceReport report = mscastle::persistence_scores(
        sweep_result, cbar, strict_signs, persistence_threshold);
    const mscastle::CausalGraphEstimate graph =
        mscastle::persistent_graph(report, sweep_result);
    const std::string tag = format_compact(cbar);
    const fs::path report_path = out_dir / ("persistence_c" + tag + ".csv");
    const fs::path edges_path = out_dir / ("persistent_edges_c" + tag + ".csv");
    mscastle::atomic_write_file(report_path,
                                persistence_csv(report, data.series_names));
    mscastle::atomic_write_file(edges_path,
                                mscastle::edges_to_csv(graph, data.series_names));
    manifest.outputs.push_back(report_path.string());
    manifest.outputs.push_back(edges_path.string());
    std::cout << "cbar " << tag << ": " << graph.edges.size()
              << " highly persistent edge(s)\n";
  }

  manifest.convergence["converged_runs"] = ok;
  manifest.convergence["total_runs"] = total;
  manifest.write(out_dir);
  return ok == total ? kExitOk : kExitNotConverged;
}

int cmd_evaluate(const std::string& estimate_dir, const std::string& truth_dir,
                 double threshold, const std::string& out) {
  const auto estimate_files =
      find_stack_files(estimate_dir, {"Z", "truth", "W"});
  if (estimate_files.empty()) {
    throw mscastle::InvalidDataError("no coefficient files found under " +
                                     estimate_dir);
  }
  const auto truth_files = find_stack_files(truth_dir, {"truth", "Z"});
  if (truth_files.empty()) {
    throw mscastle::InvalidDataError("no ground-truth files found under " +
                                     truth_dir);
  }

  const mscastle::StackedCausalMatrix estimate =
      mscastle::stack_from_csv_files(estimate_files);
  const mscastle::StackedCausalMatrix truth =
      mscastle::stack_from_csv_files(truth_files);
  const mscastle::StackScore scores =
      mscastle::score_stack(estimate, truth, threshold);

  std::printf("%5s %4s %6s %6s %8s %8s %10s %8s %8s\n", "scale", "lag", "shd",
              "extra", "missing", "reverse", "precision", "recall", "f1");
  const auto print_row = [](const std::string& scale, const std::string& lag,
                            const mscastle::StructureScore& s) {
    std::printf("%5s %4s %6ld %6ld %8ld %8ld %10.4f %8.4f %8.4f\n",
                scale.c_str(), lag.c_str(), s.shd, s.extra, s.missing,
                s.reverse, s.precision, s.recall, s.f1);
  };
  for (size_t b = 0; b < scores.per_block.size(); ++b) {
    print_row(std::to_string(scores.block_scale[b]),
              std::to_string(scores.block_lag[b]), scores.per_block[b]);
  }
  print_row("all", "all", scores.aggregate);

  if (!out.empty()) {
    RunManifest manifest;
    manifest.command = "evaluate";
    manifest.inputs = {estimate_dir, truth_dir};
    manifest.config["threshold"] = threshold;
    const fs::path out_dir(out);
    fs::create_directories(out_dir);
    mscastle::atomic_write_file(out_dir / "scores.csv", scores_csv(scores));
    manifest.outputs.push_back((out_dir / "scores.csv").string());
    manifest.write(out_dir);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiscale linear causal structure learning over time series"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key = value file");

  int jobs = 1;
  app.add_option("--jobs", jobs, "Worker threads for grids and sweeps")
      ->envname("MSCASTLE_JOBS");
  app.fallthrough();

  // simulate
  auto* simulate = app.add_subcommand(
      "simulate", "Generate synthetic benchmark datasets with ground truth");
  std::string sim_out;
  std::string sim_grid;
  int sim_n = 10;
  long sim_t = 1000;
  double sim_p = 2.0;
  int sim_replicates = 1;
  int sim_lags = 1;
  std::uint64_t sim_seed = 0;
  double sim_sparsity = -1.0;
  simulate->add_option("--out", sim_out, "Output directory")->required();
  simulate->add_option("--grid", sim_grid,
                       "Grid preset: paper-ss or paper-pgnd");
  simulate->add_option("--n", sim_n, "Series count");
  simulate->add_option("--t", sim_t, "Sample count");
  simulate->add_option("--p", sim_p, "Noise shape parameter");
  simulate->add_option("--replicates", sim_replicates, "Datasets per cell");
  simulate->add_option("--lags", sim_lags, "Maximum lag");
  simulate->add_option("--seed", sim_seed, "Master seed");
  simulate->add_option("--sparsity", sim_sparsity,
                       "Override the (N, s) pairing");

  // decompose
  auto* decompose = app.add_subcommand(
      "decompose", "Stationary wavelet decomposition of a panel");
  std::string dec_input, dec_out;
  int dec_scales = 4;
  std::string dec_wavelet = "symlet8";
  bool dec_center = false;
  decompose->add_option("--input", dec_input, "Panel CSV")->required();
  decompose->add_option("--out", dec_out, "Output directory")->required();
  decompose->add_option("--scales", dec_scales, "Decomposition levels");
  decompose->add_option("--wavelet", dec_wavelet,
                        "haar, daubechies4 or symlet8");
  decompose->add_flag("--center", dec_center, "Subtract column means first");

  // fit
  auto* fit_cmd = app.add_subcommand(
      "fit", "Estimate the causal coefficient stack for one lambda");
  std::string fit_input, fit_out;
  int fit_lags = 1;
  int fit_scales = 1;
  std::string fit_wavelet = "symlet8";
  bool fit_no_decompose = false;
  bool fit_center = false;
  double fit_edge_threshold = 0.0;
  SolverFlags fit_flags;
  fit_cmd->add_option("--input", fit_input, "Panel CSV")->required();
  fit_cmd->add_option("--out", fit_out, "Output directory")->required();
  fit_cmd->add_option("--lags", fit_lags, "Maximum lag");
  fit_cmd->add_option("--scales", fit_scales, "Decomposition levels");
  fit_cmd->add_option("--wavelet", fit_wavelet, "haar, daubechies4 or symlet8");
  fit_cmd->add_flag("--no-decompose", fit_no_decompose,
                    "Fit the raw panel (single-scale mode)");
  fit_cmd->add_flag("--center", fit_center, "Subtract column means first");
  fit_cmd->add_option("--edge-threshold", fit_edge_threshold,
                      "Magnitude cutoff for the edge list");
  fit_flags.attach(fit_cmd);

  // sweep
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Lambda sweep with persistence analysis");
  std::string sweep_input, sweep_out;
  int sweep_lags = 1;
  int sweep_scales = 1;
  std::string sweep_wavelet = "symlet8";
  bool sweep_no_decompose = false;
  bool sweep_center = false;
  double sweep_lo = 0.003;
  double sweep_hi = 0.03;
  int sweep_k = 10;
  std::vector<double> sweep_cbars = {0.01, 0.05, 0.1};
  bool sweep_auto = false;
  double probe_lo = 1e-4;
  double probe_hi = 1.0;
  int probe_count = 13;
  bool sweep_strict = false;
  double sweep_pthresh = 0.95;
  SolverFlags sweep_flags;
  sweep_cmd->add_option("--input", sweep_input, "Panel CSV")->required();
  sweep_cmd->add_option("--out", sweep_out, "Output directory")->required();
  sweep_cmd->add_option("--lags", sweep_lags, "Maximum lag");
  sweep_cmd->add_option("--scales", sweep_scales, "Decomposition levels");
  sweep_cmd->add_option("--wavelet", sweep_wavelet,
                        "haar, daubechies4 or symlet8");
  sweep_cmd->add_flag("--no-decompose", sweep_no_decompose,
                      "Sweep on the raw panel (single-scale mode)");
  sweep_cmd->add_flag("--center", sweep_center, "Subtract column means first");
  sweep_cmd->add_option("--lambda-lo", sweep_lo, "Smallest lambda");
  sweep_cmd->add_option("--lambda-hi", sweep_hi, "Largest lambda");
  sweep_cmd->add_option("--k", sweep_k, "Number of lambda values");
  sweep_cmd->add_option("--cbar", sweep_cbars, "Persistence magnitude cutoffs")
      ->delimiter(',');
  sweep_cmd->add_flag("--auto-range", sweep_auto,
                      "Pick [lambda-lo, lambda-hi] from the ratio window [0.1, 1]");
  sweep_cmd->add_option("--probe-lo", probe_lo, "Auto-range probe grid start");
  sweep_cmd->add_option("--probe-hi", probe_hi, "Auto-range probe grid end");
  sweep_cmd->add_option("--probe-count", probe_count, "Auto-range probe count");
  sweep_cmd->add_flag("--strict-signs", sweep_strict,
                      "Count sub-threshold sign flips as instability");
  sweep_cmd->add_option("--persistence-threshold", sweep_pthresh,
                        "Highly-persistent cutoff on p");
  sweep_flags.attach(sweep_cmd);

  // evaluate
  auto* evaluate = app.add_subcommand(
      "evaluate", "Score an estimated stack against a ground truth");
  std::string eval_estimate, eval_truth, eval_out;
  double eval_threshold = mscastle::kDefaultEdgeThreshold;
  evaluate->add_option("--estimate", eval_estimate, "Directory with Z_s*_l*.csv")
      ->required();
  evaluate->add_option("--truth", eval_truth, "Directory with truth_s*_l*.csv")
      ->required();
  evaluate->add_option("--threshold", eval_threshold, "Binarization cutoff");
  evaluate->add_option("--out", eval_out, "Optional directory for scores.csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      std::optional<double> sparsity;
      if (sim_sparsity > 0.0) sparsity = sim_sparsity;
      return cmd_simulate(sim_out, sim_grid, sim_n, sim_t, sim_p,
                          sim_replicates, sim_lags, sim_seed, sparsity, jobs);
    }
    if (decompose->parsed()) {
      return cmd_decompose(dec_input, dec_out, dec_scales, dec_wavelet,
                           dec_center);
    }
    if (fit_cmd->parsed()) {
      return cmd_fit(fit_input, fit_out, fit_lags, fit_scales, fit_wavelet,
                     fit_no_decompose, fit_center, fit_edge_threshold,
                     fit_flags);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(sweep_input, sweep_out, sweep_lags, sweep_scales,
                       sweep_wavelet, sweep_no_decompose, sweep_center,
                       sweep_lo, sweep_hi, sweep_k, sweep_cbars, sweep_auto,
                       probe_lo, probe_hi, probe_count, sweep_strict,
                       sweep_pthresh, sweep_flags, jobs);
    }
    if (evaluate->parsed()) {
      return cmd_evaluate(eval_estimate, eval_truth, eval_threshold, eval_out);
    }
  } catch (const mscastle::RangeNotFound& error) {
    std::cerr << "error: " << error.what() << "\nobserved ratio curve:\n";
    for (size_t i = 0; i < error.lambdas().size(); ++i) {
      std::cerr << "  lambda " << error.lambdas()[i] << " -> ratio "
                << error.ratios()[i] << "\n";
    }
    return kExitError;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
