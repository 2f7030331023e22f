#ifndef MSCASTLE_SOLVER_HPP_
#define MSCASTLE_SOLVER_HPP_

#include <cstdint>
#include <vector>

#include "mscastle/model.hpp"
#include "mscastle/types.hpp"
#include "mscastle/wavelet.hpp"

namespace mscastle {

struct SolverConfig {
  double lambda = 0.1;      // sparsity weight, >= 0
  double rho = 1.0;         // quadratic penalty, > 0
  double gamma0 = 0.1;      // initial dual step for the acyclicity multiplier
  double gamma_max = 1e16;  // cap for the escalated dual step
  double ratio_r = 0.25;    // escalate gamma when h_{k+1}/h_k exceeds this
  double tol_h = 1e-8;      // acyclicity tolerance
  double tol_primal = 1e-6; // tolerance on ||w - z||_2
  int max_iter = 5000;
  double inner_tol = 1e-6;  // gradient-norm tolerance of the quadratic subproblem
  int inner_max_iter = 500;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SolverState {
  StackedCausalMatrix w;  // dense fit (primal)
  StackedCausalMatrix z;  // sparse estimate with exact zeros (canonical output)
  Matrix beta;            // scaled dual on the pattern
  double alpha = 0.0;     // dual for the acyclicity constraint
  int iterations = 0;
  std::vector<double> h_history;
  std::vector<double> objective_history;
  std::vector<double> gamma_history;
  double fit_loss = 0.0;      // ||Ytilde - Ybar*W||_F^2 / (2*T_eff)
  double reg_loss = 0.0;      // lambda * ||Z||_1
  double h_final = 0.0;
  double primal_residual = 0.0;  // ||w - z||_2
  double dual_residual = 0.0;    // rho * ||z_{k+1} - z_k||_2
  double gamma_final = 0.0;
  bool converged = false;
};

double soft_threshold(double x, double delta);

// The data misfit is averaged over rows throughout:
//   fit(W) = ||Ytilde - Ybar*W||_F^2 / (2*T_eff),
// which keeps the sparsity weight lambda on the scale of the coefficients
// (the soft-threshold bias of a unit-variance regressor is lambda/rho)
// independent of the sample count.

// Gradient of the linearized subproblem objective
//   fit(W) + alpha*Tr(G0^T W0) + (rho/2)*||w - z + beta||^2
// masked to the free pattern. g0 is the dagness gradient at the linearization
// point, an Nbar x Nbar matrix added on the lag-0 block rows only.
Matrix subproblem_gradient(const Matrix& w, const LaggedDesign& design,
                           double alpha, const Matrix& g0, const Matrix& z,
                           const Matrix& beta, double rho,
                           const StackedPattern& pattern);

// Linearized scaled ADMM. Alternates an exact solve of the strongly convex
// quadratic subproblem on the free pattern (per-column normal equations with
// cached factorizations), the closed-form soft-threshold step, and dual
// ascent with the adaptive gamma escalation rule. Non-convergence within
// max_iter is a flagged result, not an error.
SolverState fit(const LaggedDesign& design, const StackedPattern& pattern,
                const SolverConfig& config);

struct MultiscaleFit {
  ScaleAugmentedPanel augmented;
  SolverState state;
  CausalGraphEstimate graph;
};

// Decompose -> build design -> fit with the per-scale block pattern. The
// graph is read from Z at the given edge threshold.
MultiscaleFit fit_multiscale(const TimeSeriesPanel& panel, int levels,
                             const FilterPair& filter, int lags,
                             const SolverConfig& config,
                             double edge_threshold = 0.0);

}  // namespace mscastle

#endif  // MSCASTLE_SOLVER_HPP_
