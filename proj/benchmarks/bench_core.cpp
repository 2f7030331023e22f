#include <benchmark/benchmark.h>

#include <random>

#include "mscastle/dagness.hpp"
#include "mscastle/solver.hpp"
#include "mscastle/synth.hpp"
#include "mscastle/wavelet.hpp"

using namespace mscastle;

namespace {

Matrix random_matrix(long rows, long cols, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) m(i, j) = dist(gen);
  }
  return m;
}

void BM_h_value(benchmark::State& state) {
  const Matrix w = random_matrix(state.range(0), state.range(0), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(h_value(w));
  }
}
BENCHMARK(BM_h_value)->Arg(10)->Arg(30)->Arg(60)->Arg(120);

void BM_h_blockdiag(benchmark::State& state) {
  // Four blocks of size n, matching the multiscale fast path.
  const long n = state.range(0);
  std::vector<Matrix> blocks;
  for (int d = 0; d < 4; ++d) blocks.push_back(random_matrix(n, n, 10 + d));
  for (auto _ : state) {
    benchmark::DoNotOptimize(h_blockdiag(blocks).value);
  }
}
BENCHMARK(BM_h_blockdiag)->Arg(10)->Arg(30);

void BM_swt_decompose(benchmark::State& state) {
  const TimeSeriesPanel panel =
      make_panel(random_matrix(state.range(0), 15, 3));
  const FilterPair filter = filter_bank(WaveletFamily::kSymlet8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(swt_decompose(panel, 4, filter).details.sum());
  }
}
BENCHMARK(BM_swt_decompose)->Arg(336)->Arg(1024)->Arg(4096);

void BM_fit_single_scale(benchmark::State& state) {
  StructureConfig config;
  config.series = static_cast<int>(state.range(0));
  config.lags = 1;
  config.sparsity = sparsity_for(config.series);
  const GroundTruth truth = generate_structure(config, 5);
  const TimeSeriesPanel panel = simulate(truth, 1000, 6);
  const LaggedDesign design = build_design(panel, 1);
  const StackedPattern pattern = pattern_for(1, 1, config.series);
  SolverConfig solver_config;
  solver_config.lambda = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit(design, pattern, solver_config).iterations);
  }
}
BENCHMARK(BM_fit_single_scale)->Unit(benchmark::kMillisecond)->Arg(10)->Arg(30);

void BM_sample_pgnd(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_pgnd(1.5, state.range(0), 9).sum());
  }
}
BENCHMARK(BM_sample_pgnd)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
