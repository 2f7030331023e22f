#include "mscastle/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mscastle/errors.hpp"
#include "mscastle/parallel.hpp"

namespace mscastle {

long SweepResult::converged_count() const {
  long count = 0;
  for (char flag : converged) count += flag ? 1 : 0;
  return count;
}

SweepResult sweep(const LaggedDesign& design, const StackedPattern& pattern,
                  const SolverConfig& base_config,
                  const std::vector<double>& lambdas, int jobs) {
  if (lambdas.size() < 2) {
    throw std::invalid_argument("sweep: need at least two lambda values");
  }
  for (size_t i = 1; i < lambdas.size(); ++i) {
    if (lambdas[i] <= lambdas[i - 1]) {
      throw std::invalid_argument("sweep: lambdas must be strictly increasing");
    }
  }

  const long k = static_cast<long>(lambdas.size());
  SweepResult result;
  result.lambdas = lambdas;
  result.ratios.resize(k);
  result.fit_losses.resize(k);
  result.reg_losses.resize(k);
  result.h_finals.resize(k);
  result.primal_residuals.resize(k);
  result.converged.assign(k, 0);
  result.coefficients.resize(k);

  parallel_for(k, jobs, [&](long i) {
    SolverConfig config = base_config;
    config.lambda = lambdas[static_cast<size_t>(i)];
    SolverState state = fit(design, pattern, config);
    result.fit_losses[static_cast<size_t>(i)] = state.fit_loss;
    result.reg_losses[static_cast<size_t>(i)] = state.reg_loss;
    result.ratios[static_cast<size_t>(i)] =
        state.fit_loss > 0.0 ? state.reg_loss / state.fit_loss
                             : std::numeric_limits<double>::infinity();
    result.h_finals[static_cast<size_t>(i)] = state.h_final;
    result.primal_residuals[static_cast<size_t>(i)] = state.primal_residual;
    result.converged[static_cast<size_t>(i)] = state.converged ? 1 : 0;
    result.coefficients[static_cast<size_t>(i)] = std::move(state.z);
  });

  if (result.converged_count() == 0) {
    throw SweepFailure("sweep: no run converged");
  }
  return result;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(0.0 < lo && lo < hi) || count < 2) {
    throw std::invalid_argument("log_spaced: need 0 < lo < hi and count >= 2");
  }
  std::vector<double> values(static_cast<size_t>(count));
  const double log_lo = std::log(lo);
  const double step = (std::log(hi) - log_lo) / (count - 1);
  for (int i = 0; i < count; ++i) {
    values[static_cast<size_t>(i)] = std::exp(log_lo + i * step);
  }
  values.front() = lo;
  values.back() = hi;
  return values;
}

namespace {

// Interpolates the lambda at which the log-linear segment between probes a
// and b crosses `level`.
double cross_point(double lambda_a, double ratio_a, double lambda_b,
                   double ratio_b, double level) {
  if (ratio_a == ratio_b) return lambda_a;
  const double t = (level - ratio_a) / (ratio_b - ratio_a);
  return std::exp(std::log(lambda_a) +
                  t * (std::log(lambda_b) - std::log(lambda_a)));
}

}  // namespace

std::pair<double, double> range_from_ratio_curve(
    const std::vector<double>& lambdas, const std::vector<double>& ratios,
    double ratio_lo, double ratio_hi) {
  if (lambdas.size() != ratios.size() || lambdas.size() < 2) {
    throw std::invalid_argument("range_from_ratio_curve: need >= 2 probes");
  }
  const size_t k = lambdas.size();
  const auto in_band = [&](double r) { return r >= ratio_lo && r <= ratio_hi; };

  // Walk segments; track entry into and exit from the band of the piecewise
  // interpolant.
  bool entered = in_band(ratios[0]);
  double lo = entered ? lambdas[0] : 0.0;
  double hi = 0.0;
  for (size_t i = 0; i + 1 < k; ++i) {
    const double ra = ratios[i];
    const double rb = ratios[i + 1];
    const double la = lambdas[i];
    const double lb = lambdas[i + 1];
    if (!entered) {
      // Does this segment enter the band?
      if (in_band(rb)) {
        entered = true;
        lo = ra < ratio_lo ? cross_point(la, ra, lb, rb, ratio_lo)
                           : cross_point(la, ra, lb, rb, ratio_hi);
      } else if ((ra < ratio_lo && rb > ratio_hi) ||
                 (ra > ratio_hi && rb < ratio_lo)) {
        // Jumps across the whole band within one segment.
        const double c_lo = cross_point(la, ra, lb, rb, ratio_lo);
        const double c_hi = cross_point(la, ra, lb, rb, ratio_hi);
        return {std::min(c_lo, c_hi), std::max(c_lo, c_hi)};
      }
      continue;
    }
    // Inside the band: find where the curve leaves it.
    if (!in_band(rb)) {
      hi = rb > ratio_hi ? cross_point(la, ra, lb, rb, ratio_hi)
                         : cross_point(la, ra, lb, rb, ratio_lo);
      return {lo, hi};
    }
  }
  if (entered) {
    return {lo, lambdas.back()};
  }
  throw RangeNotFound(
      "ratio curve never enters [" + std::to_string(ratio_lo) + ", " +
          std::to_string(ratio_hi) + "]",
      lambdas, ratios);
}

std::pair<double, double> select_lambda_range(
    const LaggedDesign& design, const StackedPattern& pattern,
    const SolverConfig& config, const std::vector<double>& probe_lambdas,
    int jobs, double ratio_lo, double ratio_hi) {
  if (probe_lambdas.size() < 2 ||
      probe_lambdas.back() / probe_lambdas.front() < 100.0) {
    throw std::invalid_argument(
        "select_lambda_range: probe grid must span at least two decades");
  }
  const SweepResult probes = sweep(design, pattern, config, probe_lambdas, jobs);
  return range_from_ratio_curve(probes.lambdas, probes.ratios, ratio_lo, ratio_hi);
}

PersistenceReport persistence_scores(const SweepResult& sweep_result,
                                     double cbar, bool strict_signs,
                                     double persistence_threshold) {
  if (cbar < 0.0) {
    throw std::invalid_argument("persistence_scores: cbar must be >= 0");
  }
  std::vector<long> used;
  for (size_t k = 0; k < sweep_result.converged.size(); ++k) {
    if (sweep_result.converged[k]) used.push_back(static_cast<long>(k));
  }
  if (used.empty()) {
    throw std::invalid_argument("persistence_scores: no converged run");
  }

  const StackedPattern& pattern = sweep_result.coefficients.front().pattern;
  const long v = pattern.rows();
  const long nbar = pattern.cols();

  double ratio_sum = 0.0;
  for (long k : used) ratio_sum += sweep_result.ratios[static_cast<size_t>(k)];

  PersistenceReport report;
  report.pattern = pattern;
  report.cbar = cbar;
  report.strict_signs = strict_signs;
  report.persistence_threshold = persistence_threshold;
  report.scores = Matrix::Zero(v, nbar);
  report.sign_stable = BoolMatrix::Constant(v, nbar, true);
  report.highly_persistent = BoolMatrix::Constant(v, nbar, false);

  for (long r = 0; r < v; ++r) {
    for (long c = 0; c < nbar; ++c) {
      if (!pattern.mask(r, c)) continue;
      double weighted = 0.0;
      int sign_seen = 0;
      bool stable = true;
      for (long k : used) {
        const double w =
            sweep_result.coefficients[static_cast<size_t>(k)].values(r, c);
        const bool above = std::abs(w) > cbar;
        if (above) {
          weighted += sweep_result.ratios[static_cast<size_t>(k)];
        }
        const bool counts_for_sign = strict_signs ? (w != 0.0) : above;
        if (counts_for_sign) {
          const int sgn = w > 0.0 ? 1 : -1;
          if (sign_seen == 0) {
            sign_seen = sgn;
          } else if (sgn != sign_seen) {
            stable = false;
          }
        }
      }
      const double p = ratio_sum > 0.0 ? weighted / ratio_sum : 0.0;
      report.scores(r, c) = p;
      report.sign_stable(r, c) = stable;
      report.highly_persistent(r, c) = stable && p > persistence_threshold;
    }
  }
  return report;
}

CausalGraphEstimate persistent_graph(const PersistenceReport& report,
                                     const SweepResult& sweep_result) {
  const StackedPattern& pattern = report.pattern;
  StackedCausalMatrix medians = StackedCausalMatrix::zeros(pattern);

  std::vector<long> used;
  for (size_t k = 0; k < sweep_result.converged.size(); ++k) {
    if (sweep_result.converged[k]) used.push_back(static_cast<long>(k));
  }

  std::vector<double> weights;
  for (long r = 0; r < pattern.rows(); ++r) {
    for (long c = 0; c < pattern.cols(); ++c) {
      if (!report.highly_persistent(r, c)) continue;
      weights.clear();
      for (long k : used) {
        const double w =
            sweep_result.coefficients[static_cast<size_t>(k)].values(r, c);
        if (std::abs(w) > report.cbar) weights.push_back(w);
      }
      if (weights.empty()) continue;
      std::sort(weights.begin(), weights.end());
      const size_t mid = weights.size() / 2;
      medians.values(r, c) = weights.size() % 2 == 1
                                 ? weights[mid]
                                 : 0.5 * (weights[mid - 1] + weights[mid]);
    }
  }
  // Threshold 0: the medians matrix already carries exactly the persistent
  // edges (median magnitudes exceed cbar >= 0 by construction).
  return to_graph(medians, 0.0);
}

}  // namespace mscastle
