#include <doctest.h>

#include <cmath>
#include <random>

#include "mscastle/model.hpp"

using namespace mscastle;

namespace {

Matrix random_panel(long rows, long cols, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) m(i, j) = dist(gen);
  }
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("model");

TEST_CASE("lag 0 design is the identity construction") {
  const Matrix panel = random_panel(10, 3, 1);
  const LaggedDesign design = build_design(panel, 0);
  CHECK(design.effective_rows() == 10);
  CHECK((design.regressors - design.target).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single-lag design shifts rows as expected") {
  Matrix panel(4, 1);
  panel << 1, 2, 3, 4;
  const LaggedDesign design = build_design(panel, 1);
  CHECK(design.effective_rows() == 3);
  CHECK(design.target(0, 0) == 2.0);
  CHECK(design.target(2, 0) == 4.0);
  CHECK(design.regressors(0, 0) == 2.0);  // block 0 = target
  CHECK(design.regressors(0, 1) == 1.0);  // block 1 = shifted by one
  CHECK(design.regressors(2, 1) == 3.0);
}

TEST_CASE("effective rows are T - L") {
  const Matrix panel = random_panel(5, 2, 2);
  CHECK(build_design(panel, 2).effective_rows() == 3);
  CHECK_THROWS_AS(build_design(panel, 5), std::invalid_argument);
  CHECK_THROWS_AS(build_design(panel, -1), std::invalid_argument);
}

TEST_CASE("design rows correspond to panel rows") {
  const long t_len = 12;
  const int lags = 3;
  const Matrix panel = random_panel(t_len, 2, 3);
  const LaggedDesign design = build_design(panel, lags);
  CHECK(design.var_count() == 2 * (lags + 1));
  for (long t = 0; t < design.effective_rows(); ++t) {
    CHECK((design.target.row(t) - panel.row(t + lags)).cwiseAbs().maxCoeff() == 0.0);
    for (int l = 0; l <= lags; ++l) {
      CHECK((design.regressors.row(t).segment(l * 2, 2) - panel.row(t + lags - l))
                .cwiseAbs()
                .maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("pattern free-entry counts match the counting formula") {
  CHECK(pattern_for(0, 1, 2).free_count() == 2);
  CHECK(pattern_for(1, 2, 3).free_count() == 30);
  CHECK(pattern_for(2, 3, 3).free_count() == 72);

  for (int lags : {0, 1, 2}) {
    for (int scales : {1, 2, 3}) {
      for (int n : {2, 4}) {
        const long expected = static_cast<long>(scales) * n * n * (lags + 1) -
                              static_cast<long>(scales) * n;
        CHECK(pattern_for(lags, scales, n).free_count() == expected);
      }
    }
  }
}

TEST_CASE("single-scale pattern frees everything except the lag-0 diagonal") {
  const StackedPattern pattern = pattern_for(2, 1, 3);
  for (long r = 0; r < pattern.rows(); ++r) {
    for (long c = 0; c < pattern.cols(); ++c) {
      const bool lag0_diag = r < 3 && r == c;
      CHECK(pattern.mask(r, c) == !lag0_diag);
    }
  }
}

TEST_CASE("off-scale blocks are never free") {
  const StackedPattern pattern = pattern_for(1, 2, 2);
  // Row of scale 1 must not map onto a column of scale 2.
  CHECK(pattern.mask(0, 2) == false);
  CHECK(pattern.mask(0, 3) == false);
  CHECK(pattern.mask(2, 0) == false);  // scale 2 row, scale 1 column
  CHECK(pattern.mask(0, 1) == true);   // scale 1 off-diagonal
  CHECK(pattern.mask(4, 1) == true);   // lag 1, scale 1, self-loop allowed
}

TEST_CASE("to_graph examples") {
  StackedCausalMatrix w = StackedCausalMatrix::zeros(pattern_for(1, 1, 3));

  CausalGraphEstimate empty = to_graph(w, 0.0);
  CHECK(empty.edges.empty());
  CHECK(empty.acyclicity_residual == doctest::Approx(0.0).epsilon(1e-15));

  w.block(1, 0)(0, 1) = 0.3;
  CHECK(to_graph(w, 0.5).edges.empty());

  w.block(1, 0)(0, 1) = 0.0;
  w.block(1, 1)(0, 1) = 0.3;
  const CausalGraphEstimate graph = to_graph(w, 0.01);
  REQUIRE(graph.edges.size() == 1);
  CHECK(graph.edges[0].source == 0);
  CHECK(graph.edges[0].target == 1);
  CHECK(graph.edges[0].lag == 1);
  CHECK(graph.edges[0].scale == 1);
  CHECK(graph.edges[0].weight == 0.3);
  CHECK(graph.adjacency_for(1, 1)(0, 1) == 0.3);
}

TEST_CASE("graph round-trip reproduces all entries above the threshold") {
  std::mt19937 gen(9);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  StackedCausalMatrix w = StackedCausalMatrix::zeros(pattern_for(1, 2, 3));
  for (long r = 0; r < w.values.rows(); ++r) {
    for (long c = 0; c < w.values.cols(); ++c) {
      if (w.pattern.mask(r, c)) w.values(r, c) = dist(gen);
    }
  }
  const double threshold = 0.25;
  const StackedCausalMatrix back = from_graph(to_graph(w, threshold));
  for (long r = 0; r < w.values.rows(); ++r) {
    for (long c = 0; c < w.values.cols(); ++c) {
      if (std::abs(w.values(r, c)) > threshold) {
        CHECK(back.values(r, c) == w.values(r, c));
      } else {
        CHECK(back.values(r, c) == 0.0);
      }
    }
  }
}

TEST_CASE("enforce_pattern zeroes stray entries") {
  StackedCausalMatrix w = StackedCausalMatrix::zeros(pattern_for(0, 2, 2));
  w.values.setConstant(1.0);
  w.enforce_pattern();
  CHECK(w.values(0, 0) == 0.0);  // lag-0 diagonal
  CHECK(w.values(0, 2) == 0.0);  // cross-scale
  CHECK(w.values(0, 1) == 1.0);
}

TEST_SUITE_END();
