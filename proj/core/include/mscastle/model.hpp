#ifndef MSCASTLE_MODEL_HPP_
#define MSCASTLE_MODEL_HPP_

#include <string>
#include <vector>

#include "mscastle/types.hpp"
#include "mscastle/wavelet.hpp"

namespace mscastle {

// Lagged regression data: target rows L+1..T of the (possibly augmented)
// panel, regressor block l the panel shifted down by l rows. The first L
// rows are trimmed, never zero-padded.
struct LaggedDesign {
  Matrix target;      // T_eff x Nbar
  Matrix regressors;  // T_eff x V, V = Nbar*(L+1)
  int lags = 0;

  long effective_rows() const { return target.rows(); }
  long var_count() const { return regressors.cols(); }
};

LaggedDesign build_design(const Matrix& panel, int lags);
LaggedDesign build_design(const TimeSeriesPanel& panel, int lags);
LaggedDesign build_design(const ScaleAugmentedPanel& aug, int lags);

// Admissible support of the stacked coefficient matrix: for every lag, only
// the per-scale N x N diagonal blocks are free; within the lag-0 stack the
// block diagonals (instantaneous self-loops) are excluded.
struct StackedPattern {
  BoolMatrix mask;  // V x Nbar
  int lags = 0;
  int scales = 1;
  int series_per_scale = 0;

  long rows() const { return mask.rows(); }
  long cols() const { return mask.cols(); }
  long free_count() const { return mask.cast<long>().sum(); }
  bool same_shape(const StackedPattern& other) const {
    return lags == other.lags && scales == other.scales &&
           series_per_scale == other.series_per_scale;
  }
};

StackedPattern pattern_for(int lags, int scales, int series_per_scale);

// The stacked causal matrix W. Entries off the pattern are exactly zero.
struct StackedCausalMatrix {
  Matrix values;  // V x Nbar
  StackedPattern pattern;

  static StackedCausalMatrix zeros(const StackedPattern& pattern);

  int lags() const { return pattern.lags; }
  int scales() const { return pattern.scales; }
  int series() const { return pattern.series_per_scale; }

  // Scale in 1..D, lag in 0..L.
  Eigen::Block<Matrix> block(int scale, int lag);
  Eigen::Block<const Matrix> block(int scale, int lag) const;

  std::vector<Matrix> lag0_blocks() const;

  // Zeroes anything off-pattern (the pattern is authoritative).
  void enforce_pattern();

  double l1_norm() const { return values.cwiseAbs().sum(); }
};

struct CausalEdge {
  int source = 0;  // 0-based series index (parent)
  int target = 0;  // 0-based series index (caused)
  int lag = 0;     // 0..L
  int scale = 1;   // 1..D
  double weight = 0.0;
};

// Thresholded view of an estimate: edge list plus per-(scale, lag)
// adjacency matrices (two views of identical content), and the acyclicity
// residual of the thresholded lag-0 blocks.
struct CausalGraphEstimate {
  std::vector<CausalEdge> edges;
  std::vector<Matrix> adjacency;  // index scale_lag_index(scale, lag)
  int lags = 0;
  int scales = 1;
  int series_per_scale = 0;
  double edge_threshold = 0.0;
  double acyclicity_residual = 0.0;

  int scale_lag_index(int scale, int lag) const {
    return (scale - 1) * (lags + 1) + lag;
  }
  const Matrix& adjacency_for(int scale, int lag) const {
    return adjacency[scale_lag_index(scale, lag)];
  }
};

CausalGraphEstimate to_graph(const StackedCausalMatrix& w, double edge_threshold);

// Rebuilds the stacked matrix from a graph (entries below the graph's
// threshold are zero). Round-trips with to_graph.
StackedCausalMatrix from_graph(const CausalGraphEstimate& graph);

}  // namespace mscastle

#endif  // MSCASTLE_MODEL_HPP_
