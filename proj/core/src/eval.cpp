#include "mscastle/eval.hpp"

#include <cmath>
#include <stdexcept>

namespace mscastle {

namespace {

void finish_rates(StructureScore& s, long true_positive, long est_count,
                  long truth_count) {
  if (est_count == 0 && truth_count == 0) {
    s.precision = s.recall = s.f1 = 1.0;
    return;
  }
  s.precision = est_count > 0
                    ? static_cast<double>(true_positive) / static_cast<double>(est_count)
                    : 0.0;
  s.recall = truth_count > 0
                 ? static_cast<double>(true_positive) / static_cast<double>(truth_count)
                 : 0.0;
  const double denom = s.precision + s.recall;
  s.f1 = denom > 0.0 ? 2.0 * s.precision * s.recall / denom : 0.0;
}

}  // namespace

StructureScore score(const Matrix& estimated, const Matrix& truth, bool lagged,
                     double edge_threshold) {
  if (estimated.rows() != estimated.cols() || truth.rows() != truth.cols() ||
      estimated.rows() != truth.rows()) {
    throw std::invalid_argument("score: matrices must be square and same size");
  }
  if (edge_threshold < 0.0) {
    throw std::invalid_argument("score: threshold must be >= 0");
  }
  const long n = estimated.rows();
  const auto est = [&](long i, long j) {
    return i != j && std::abs(estimated(i, j)) > edge_threshold;
  };
  const auto tru = [&](long i, long j) {
    return i != j && std::abs(truth(i, j)) > edge_threshold;
  };

  StructureScore s;
  s.edge_threshold = edge_threshold;
  long true_positive = 0;
  long est_count = 0;
  long truth_count = 0;

  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      if (i == j) continue;
      const bool e = est(i, j);
      const bool t = tru(i, j);
      if (e) ++est_count;
      if (t) ++truth_count;
      if (e && t) ++true_positive;

      if (!lagged) {
        // Reverse: the truth edge is hit only with flipped direction. The
        // flipped estimated edge is consumed by this count, so it is not
        // also extra, and the truth edge is not also missing.
        if (t && !e && est(j, i)) {
          ++s.reverse;
          continue;
        }
        if (t && !e) ++s.missing;
        if (e && !t && !(tru(j, i) && !est(j, i))) ++s.extra;
      } else {
        if (t && !e) ++s.missing;
        if (e && !t) ++s.extra;
      }
    }
  }
  s.shd = s.extra + s.missing + s.reverse;
  finish_rates(s, true_positive, est_count, truth_count);
  return s;
}

StackScore score_stack(const StackedCausalMatrix& estimated,
                       const StackedCausalMatrix& truth,
                       double edge_threshold) {
  if (!estimated.pattern.same_shape(truth.pattern)) {
    throw std::invalid_argument("score_stack: pattern mismatch");
  }

  StackScore out;
  long true_positive = 0;
  long est_count = 0;
  long truth_count = 0;
  for (int scale = 1; scale <= estimated.scales(); ++scale) {
    for (int lag = 0; lag <= estimated.lags(); ++lag) {
      const StructureScore block_score =
          score(estimated.block(scale, lag), truth.block(scale, lag), lag > 0,
                edge_threshold);
      out.per_block.push_back(block_score);
      out.block_scale.push_back(scale);
      out.block_lag.push_back(lag);
      out.aggregate.extra += block_score.extra;
      out.aggregate.missing += block_score.missing;
      out.aggregate.reverse += block_score.reverse;
      // Recover the confusion counts for micro-averaged rates.
      const Matrix est_block = estimated.block(scale, lag);
      const Matrix tru_block = truth.block(scale, lag);
      for (long i = 0; i < est_block.rows(); ++i) {
        for (long j = 0; j < est_block.cols(); ++j) {
          if (i == j) continue;
          const bool e = std::abs(est_block(i, j)) > edge_threshold;
          const bool t = std::abs(tru_block(i, j)) > edge_threshold;
          if (e) ++est_count;
          if (t) ++truth_count;
          if (e && t) ++true_positive;
        }
      }
    }
  }
  out.aggregate.shd =
      out.aggregate.extra + out.aggregate.missing + out.aggregate.reverse;
  out.aggregate.edge_threshold = edge_threshold;
  finish_rates(out.aggregate, true_positive, est_count, truth_count);
  return out;
}

}  // namespace mscastle
