#ifndef MSCASTLE_EVAL_HPP_
#define MSCASTLE_EVAL_HPP_

#include <vector>

#include "mscastle/model.hpp"
#include "mscastle/types.hpp"

namespace mscastle {

// Structure recovery metrics. SHD decomposes into extra edges (estimated but
// absent from the truth skeleton), missing edges (true edges not retrieved
// in either direction) and reverse edges (true edges retrieved with flipped
// direction; instantaneous matrices only).
struct StructureScore {
  long shd = 0;
  long extra = 0;
  long missing = 0;
  long reverse = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double edge_threshold = 0.0;
};

inline constexpr double kDefaultEdgeThreshold = 0.01;

// Binarizes both matrices at |w| > edge_threshold and scores directed edges.
// A true edge i->j matched only by an estimated j->i counts as one reverse
// (not one extra plus one missing); with lagged = true reverse edges cannot
// occur and every mismatch is extra or missing. True positives require the
// correct direction. An empty truth with an empty estimate scores
// precision = recall = f1 = 1.
StructureScore score(const Matrix& estimated, const Matrix& truth, bool lagged,
                     double edge_threshold = kDefaultEdgeThreshold);

struct StackScore {
  std::vector<StructureScore> per_block;  // scale-major, lag-minor
  std::vector<int> block_scale;
  std::vector<int> block_lag;
  StructureScore aggregate;  // integer counts summed, f1 micro-averaged
};

StackScore score_stack(const StackedCausalMatrix& estimated,
                       const StackedCausalMatrix& truth,
                       double edge_threshold = kDefaultEdgeThreshold);

}  // namespace mscastle

#endif  // MSCASTLE_EVAL_HPP_
