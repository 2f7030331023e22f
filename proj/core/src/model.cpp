#include "mscastle/model.hpp"

#include <cmath>
#include <stdexcept>

#include "mscastle/dagness.hpp"

namespace mscastle {

LaggedDesign build_design(const Matrix& panel, int lags) {
  const long t_len = panel.rows();
  const long nbar = panel.cols();
  if (lags < 0) throw std::invalid_argument("build_design: lags must be >= 0");
  if (lags >= t_len) {
    throw std::invalid_argument("build_design: lags must be smaller than T");
  }
  const long t_eff = t_len - lags;

  LaggedDesign design;
  design.lags = lags;
  design.target = panel.bottomRows(t_eff);
  design.regressors.resize(t_eff, nbar * (lags + 1));
  for (int l = 0; l <= lags; ++l) {
    design.regressors.block(0, l * nbar, t_eff, nbar) =
        panel.block(lags - l, 0, t_eff, nbar);
  }
  return design;
}

LaggedDesign build_design(const TimeSeriesPanel& panel, int lags) {
  return build_design(panel.values, lags);
}

LaggedDesign build_design(const ScaleAugmentedPanel& aug, int lags) {
  return build_design(aug.details, lags);
}

StackedPattern pattern_for(int lags, int scales, int series_per_scale) {
  if (lags < 0 || scales < 1 || series_per_scale < 1) {
    throw std::invalid_argument("pattern_for: lags >= 0, scales >= 1, series >= 1");
  }
  const long n = series_per_scale;
  const long nbar = static_cast<long>(scales) * n;

  StackedPattern pattern;
  pattern.lags = lags;
  pattern.scales = scales;
  pattern.series_per_scale = series_per_scale;
  pattern.mask = BoolMatrix::Constant(nbar * (lags + 1), nbar, false);
  for (int l = 0; l <= lags; ++l) {
    for (int d = 0; d < scales; ++d) {
      for (long i = 0; i < n; ++i) {
        for (long j = 0; j < n; ++j) {
          if (l == 0 && i == j) continue;  // no instantaneous self-loops
          pattern.mask(l * nbar + d * n + i, d * n + j) = true;
        }
      }
    }
  }
  return pattern;
}

StackedCausalMatrix StackedCausalMatrix::zeros(const StackedPattern& pattern) {
  StackedCausalMatrix w;
  w.pattern = pattern;
  w.values = Matrix::Zero(pattern.rows(), pattern.cols());
  return w;
}

Eigen::Block<Matrix> StackedCausalMatrix::block(int scale, int lag) {
  const long n = pattern.series_per_scale;
  const long nbar = pattern.cols();
  return values.block(lag * nbar + (scale - 1) * n, (scale - 1) * n, n, n);
}

Eigen::Block<const Matrix> StackedCausalMatrix::block(int scale, int lag) const {
  const long n = pattern.series_per_scale;
  const long nbar = pattern.cols();
  return values.block(lag * nbar + (scale - 1) * n, (scale - 1) * n, n, n);
}

std::vector<Matrix> StackedCausalMatrix::lag0_blocks() const {
  std::vector<Matrix> blocks;
  blocks.reserve(pattern.scales);
  for (int d = 1; d <= pattern.scales; ++d) {
    blocks.emplace_back(block(d, 0));
  }
  return blocks;
}

void StackedCausalMatrix::enforce_pattern() {
  values = pattern.mask.select(values, Matrix::Zero(values.rows(), values.cols()));
}

CausalGraphEstimate to_graph(const StackedCausalMatrix& w, double edge_threshold) {
  if (edge_threshold < 0.0) {
    throw std::invalid_argument("to_graph: threshold must be >= 0");
  }
  const int n = w.series();

  CausalGraphEstimate graph;
  graph.lags = w.lags();
  graph.scales = w.scales();
  graph.series_per_scale = n;
  graph.edge_threshold = edge_threshold;
  graph.adjacency.assign(static_cast<size_t>(w.scales()) * (w.lags() + 1),
                         Matrix::Zero(n, n));

  std::vector<Matrix> thresholded_lag0;
  for (int scale = 1; scale <= w.scales(); ++scale) {
    for (int lag = 0; lag <= w.lags(); ++lag) {
      Matrix& adj = graph.adjacency[graph.scale_lag_index(scale, lag)];
      const auto block = w.block(scale, lag);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const double weight = block(i, j);
          if (std::abs(weight) > edge_threshold) {
            adj(i, j) = weight;
            graph.edges.push_back({i, j, lag, scale, weight});
          }
        }
      }
      if (lag == 0) thresholded_lag0.push_back(adj);
    }
  }
  graph.acyclicity_residual = h_blockdiag(thresholded_lag0).value;
  return graph;
}

StackedCausalMatrix from_graph(const CausalGraphEstimate& graph) {
  StackedCausalMatrix w = StackedCausalMatrix::zeros(
      pattern_for(graph.lags, graph.scales, graph.series_per_scale));
  for (const CausalEdge& edge : graph.edges) {
    w.block(edge.scale, edge.lag)(edge.source, edge.target) = edge.weight;
  }
  return w;
}

}  // namespace mscastle
