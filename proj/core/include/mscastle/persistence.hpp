#ifndef MSCASTLE_PERSISTENCE_HPP_
#define MSCASTLE_PERSISTENCE_HPP_

#include <utility>
#include <vector>

#include "mscastle/model.hpp"
#include "mscastle/solver.hpp"
#include "mscastle/types.hpp"

namespace mscastle {

// Results of solving the same problem over a grid of sparsity weights.
// ratios[k] = reg_loss / fit_loss of run k. Runs are cold-started and
// independent, so they may execute concurrently; results are ordered by
// lambda regardless of scheduling.
struct SweepResult {
  std::vector<double> lambdas;
  std::vector<double> ratios;
  std::vector<double> fit_losses;
  std::vector<double> reg_losses;
  std::vector<double> h_finals;
  std::vector<double> primal_residuals;
  std::vector<StackedCausalMatrix> coefficients;  // the Z estimates
  std::vector<char> converged;

  long converged_count() const;
};

SweepResult sweep(const LaggedDesign& design, const StackedPattern& pattern,
                  const SolverConfig& base_config,
                  const std::vector<double>& lambdas, int jobs = 1);

std::vector<double> log_spaced(double lo, double hi, int count);

// Pure interpolation step behind select_lambda_range: the first contiguous
// window of the piecewise log-linear ratio curve lying inside
// [ratio_lo, ratio_hi]. Throws RangeNotFound (curve attached) if the curve
// never enters the window.
std::pair<double, double> range_from_ratio_curve(
    const std::vector<double>& lambdas, const std::vector<double>& ratios,
    double ratio_lo = 0.1, double ratio_hi = 1.0);

// Probes the ratio curve on a lambda grid and returns the sub-range whose
// ratios fall in [0.1, 1].
std::pair<double, double> select_lambda_range(
    const LaggedDesign& design, const StackedPattern& pattern,
    const SolverConfig& config, const std::vector<double>& probe_lambdas,
    int jobs = 1, double ratio_lo = 0.1, double ratio_hi = 1.0);

// Per-edge persistence over a sweep:
//   p_ij = sum_k 1{|w_ij^k| > cbar} r_k / sum_k r_k
// over converged runs. An edge is sign-stable when every run exceeding cbar
// agrees in sign; the strict variant also rejects opposite-signed
// coefficients below cbar. Highly persistent = p > 0.95 and sign-stable.
struct PersistenceReport {
  Matrix scores;             // V x Nbar, p_ij on the pattern
  BoolMatrix sign_stable;    // V x Nbar
  BoolMatrix highly_persistent;
  double cbar = 0.0;
  double persistence_threshold = 0.95;
  bool strict_signs = false;
  StackedPattern pattern;
};

PersistenceReport persistence_scores(const SweepResult& sweep_result,
                                     double cbar, bool strict_signs = false,
                                     double persistence_threshold = 0.95);

// Graph of the highly persistent edges; the reported weight is the median
// coefficient over the runs where |w| > cbar.
CausalGraphEstimate persistent_graph(const PersistenceReport& report,
                                     const SweepResult& sweep_result);

}  // namespace mscastle

#endif  // MSCASTLE_PERSISTENCE_HPP_
