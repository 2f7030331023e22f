#ifndef MSCASTLE_SYNTH_HPP_
#define MSCASTLE_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mscastle/model.hpp"
#include "mscastle/types.hpp"

namespace mscastle {

// p-generalized normal: density p^{1-1/p} / (2*Gamma(1/p)) * exp(-|x|^p / p).
// Laplace at p=1, Gaussian at p=2, approximately uniform for large p.
// Draws are realized as sign * (p*G)^{1/p} with G ~ Gamma(1/p, 1).
Vector sample_pgnd(double p, long count, std::uint64_t seed);

// Population variance p^{2/p} * Gamma(3/p) / Gamma(1/p).
double pgnd_variance(double p);

struct StructureConfig {
  int series = 10;
  int scales = 1;
  int lags = 1;
  double sparsity = 0.8;  // entries are free with probability 1 - sparsity
  double weight_min = 0.3;
  double weight_max = 0.9;
  double noise_p = 2.0;
  bool stabilize = true;  // rescale lagged blocks when the VAR is explosive
  double max_spectral_radius = 0.95;

  void validate() const;
};

struct GroundTruth {
  StackedCausalMatrix weights;
  double noise_p = 2.0;
  Vector noise_variances;  // one per (scale, series) column, in [1, 2]
  double sparsity = 0.8;
  std::uint64_t seed = 0;
};

// Per scale block: the lag-0 matrix is a Bernoulli(1-s) strictly lower
// triangular support conjugated by a random permutation (acyclic by
// construction); lagged blocks carry Bernoulli(1-s) supports. Magnitudes are
// uniform in [weight_min, weight_max] with random sign.
GroundTruth generate_structure(const StructureConfig& config, std::uint64_t seed);

// Simulates y[t] = sum_l y[t-l] W^l + eps[t], solving the instantaneous
// system exactly, with a 100-sample burn-in. Noise is scaled per series so
// its variance equals the drawn sigma^2 regardless of p. Divergence
// (|y| > 1e12) raises NumericFailure naming the sample.
TimeSeriesPanel simulate(const GroundTruth& truth, long t_len, std::uint64_t seed);

// Sparsity level paired with the network size in the benchmark grids:
// (10, .80), (30, .85), (50, .90), (100, .95); nearest size otherwise.
double sparsity_for(int series);

struct GridSpec {
  std::vector<long> t_values{1000};
  std::vector<int> n_values{10};
  std::vector<double> p_values{2.0};
  int replicates = 1;
  int lags = 1;
  std::uint64_t master_seed = 0;
  std::optional<double> sparsity_override;
  double weight_min = 0.3;
  double weight_max = 0.9;
};

struct GridEntry {
  std::string tag;
  long t = 0;
  int n = 0;
  double p = 2.0;
  double sparsity = 0.8;
  int lags = 1;
  int replicate = 0;
  std::uint64_t seed = 0;
  std::string data_path;
  std::vector<std::string> truth_paths;
};

// Writes dataset + ground-truth files for every grid cell x replicate under
// out_dir/<tag>/, with per-cell seeds derived from the master seed so
// parallel and serial runs produce identical bytes.
std::vector<GridEntry> experiment_grid(const GridSpec& spec,
                                       const std::filesystem::path& out_dir,
                                       int jobs = 1);

// One JSON object per entry, line-delimited.
std::string grid_entry_json(const GridEntry& entry);

}  // namespace mscastle

#endif  // MSCASTLE_SYNTH_HPP_
