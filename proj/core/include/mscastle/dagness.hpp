#ifndef MSCASTLE_DAGNESS_HPP_
#define MSCASTLE_DAGNESS_HPP_

#include <vector>

#include "mscastle/types.hpp"

namespace mscastle {

// Acyclicity penalty h(W) = Tr(exp(W o W)) - n, zero exactly when the
// weighted digraph of W is acyclic, and its matrix gradient
// grad h(W) = exp(W o W)^T o 2W.

struct DagnessEval {
  double value = 0.0;
  Matrix gradient;
};

// Dense matrix exponential, scaling-and-squaring with the degree-13 Pade
// approximant.
Matrix expm(const Matrix& a);

double h_value(const Matrix& w);
Matrix h_gradient(const Matrix& w);
DagnessEval h_eval(const Matrix& w);

// Block-diagonal fast path: h of block-diag(blocks) = sum of per-block h,
// with per-block gradients. Cost O(sum n_d^3) instead of O((sum n_d)^3).
struct BlockDagnessEval {
  double value = 0.0;
  std::vector<Matrix> gradients;
};

BlockDagnessEval h_blockdiag(const std::vector<Matrix>& blocks);

}  // namespace mscastle

#endif  // MSCASTLE_DAGNESS_HPP_
