#include "mscastle/synth.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <json.hpp>

#include "mscastle/csv.hpp"
#include "mscastle/errors.hpp"
#include "mscastle/io.hpp"
#include "mscastle/parallel.hpp"
#include "mscastle/rng.hpp"

namespace mscastle {

namespace {

double pgnd_draw(Rng& rng, double p) {
  const double log_g = rng.log_gamma_draw(1.0 / p);
  return rng.sign() * std::exp((std::log(p) + log_g) / p);
}

// Companion-form spectral radius of the reduced-form lagged dynamics.
double companion_spectral_radius(const std::vector<Matrix>& reduced_lagged) {
  const long n = reduced_lagged.front().rows();
  const long l_max = static_cast<long>(reduced_lagged.size());
  Matrix companion = Matrix::Zero(n * l_max, n * l_max);
  for (long l = 0; l < l_max; ++l) {
    // Row-vector dynamics y[t] = sum y[t-l] A_l transpose to column form.
    companion.block(0, l * n, n, n) = reduced_lagged[static_cast<size_t>(l)].transpose();
  }
  if (l_max > 1) {
    companion.block(n, 0, n * (l_max - 1), n * (l_max - 1)) =
        Matrix::Identity(n * (l_max - 1), n * (l_max - 1));
  }
  return companion.eigenvalues().cwiseAbs().maxCoeff();
}

std::string format_compact(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", value);
  return buf;
}

}  // namespace

Vector sample_pgnd(double p, long count, std::uint64_t seed) {
  if (p <= 0.0) throw std::invalid_argument("sample_pgnd: p must be > 0");
  if (count < 1) throw std::invalid_argument("sample_pgnd: count must be >= 1");
  Rng rng(seed);
  Vector draws(count);
  for (long i = 0; i < count; ++i) draws[i] = pgnd_draw(rng, p);
  return draws;
}

double pgnd_variance(double p) {
  if (p <= 0.0) throw std::invalid_argument("pgnd_variance: p must be > 0");
  return std::exp((2.0 / p) * std::log(p) + std::lgamma(3.0 / p) -
                  std::lgamma(1.0 / p));
}

void StructureConfig::validate() const {
  if (series < 2) throw std::invalid_argument("StructureConfig: need >= 2 series");
  if (scales < 1 || lags < 0) {
    throw std::invalid_argument("StructureConfig: scales >= 1, lags >= 0");
  }
  if (sparsity <= 0.0 || sparsity >= 1.0) {
    throw std::invalid_argument("StructureConfig: sparsity must be in (0,1)");
  }
  if (!(0.0 < weight_min && weight_min < weight_max)) {
    throw std::invalid_argument("StructureConfig: need 0 < weight_min < weight_max");
  }
  if (noise_p <= 0.0) throw std::invalid_argument("StructureConfig: noise_p must be > 0");
}

GroundTruth generate_structure(const StructureConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  const int n = config.series;
  const double edge_prob = 1.0 - config.sparsity;

  GroundTruth truth;
  truth.noise_p = config.noise_p;
  truth.sparsity = config.sparsity;
  truth.seed = seed;
  truth.weights = StackedCausalMatrix::zeros(
      pattern_for(config.lags, config.scales, n));

  for (int scale = 1; scale <= config.scales; ++scale) {
    // Instantaneous block: lower-triangular support, relabeled by a random
    // permutation, hence acyclic by construction.
    Matrix lower = Matrix::Zero(n, n);
    for (int i = 1; i < n; ++i) {
      for (int j = 0; j < i; ++j) {
        if (rng.bernoulli(edge_prob)) {
          lower(i, j) =
              rng.sign() * rng.uniform(config.weight_min, config.weight_max);
        }
      }
    }
    const std::vector<int> perm = rng.permutation(n);
    auto w0 = truth.weights.block(scale, 0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        w0(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]) =
            lower(i, j);
      }
    }

    for (int lag = 1; lag <= config.lags; ++lag) {
      auto wl = truth.weights.block(scale, lag);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (rng.bernoulli(edge_prob)) {
            wl(i, j) =
                rng.sign() * rng.uniform(config.weight_min, config.weight_max);
          }
        }
      }
    }

    if (config.stabilize && config.lags > 0) {
      const Matrix w0_dense = truth.weights.block(scale, 0);
      const Matrix m0_inv =
          (Matrix::Identity(n, n) - w0_dense).partialPivLu().inverse();
      std::vector<Matrix> reduced;
      for (int lag = 1; lag <= config.lags; ++lag) {
        reduced.emplace_back(Matrix(truth.weights.block(scale, lag)) * m0_inv);
      }
      const double radius = companion_spectral_radius(reduced);
      if (radius > config.max_spectral_radius) {
        const double shrink = config.max_spectral_radius / radius;
        for (int lag = 1; lag <= config.lags; ++lag) {
          truth.weights.block(scale, lag) *= std::pow(shrink, lag);
        }
      }
    }
  }

  const long nbar = truth.weights.pattern.cols();
  truth.noise_variances.resize(nbar);
  for (long j = 0; j < nbar; ++j) {
    truth.noise_variances[j] = rng.uniform(1.0, 2.0);
  }
  return truth;
}

TimeSeriesPanel simulate(const GroundTruth& truth, long t_len, std::uint64_t seed) {
  const int lags = truth.weights.lags();
  const int scales = truth.weights.scales();
  const int n = truth.weights.series();
  const long nbar = truth.weights.pattern.cols();
  if (t_len <= lags) throw std::invalid_argument("simulate: need T > L");

  // Assemble the block-diagonal per-lag matrices once.
  Matrix w0 = Matrix::Zero(nbar, nbar);
  std::vector<Matrix> lagged(static_cast<size_t>(lags), Matrix::Zero(nbar, nbar));
  for (int scale = 1; scale <= scales; ++scale) {
    const long offset = static_cast<long>(scale - 1) * n;
    w0.block(offset, offset, n, n) = truth.weights.block(scale, 0);
    for (int lag = 1; lag <= lags; ++lag) {
      lagged[static_cast<size_t>(lag - 1)].block(offset, offset, n, n) =
          truth.weights.block(scale, lag);
    }
  }
  const Matrix m0_inv =
      (Matrix::Identity(nbar, nbar) - w0).partialPivLu().inverse();

  const double std_p = std::sqrt(pgnd_variance(truth.noise_p));
  Vector noise_scale(nbar);
  for (long j = 0; j < nbar; ++j) {
    noise_scale[j] = std::sqrt(truth.noise_variances[j]) / std_p;
  }

  Rng rng(seed);
  const long burn_in = 100;
  const long total = t_len + burn_in;
  Matrix path = Matrix::Zero(total, nbar);
  Eigen::RowVectorXd drive(nbar);
  for (long t = 0; t < total; ++t) {
    for (long j = 0; j < nbar; ++j) {
      drive[j] = noise_scale[j] * pgnd_draw(rng, truth.noise_p);
    }
    for (int lag = 1; lag <= lags; ++lag) {
      if (t - lag >= 0) {
        drive += path.row(t - lag) * lagged[static_cast<size_t>(lag - 1)];
      }
    }
    path.row(t) = drive * m0_inv;
    if (path.row(t).cwiseAbs().maxCoeff() > 1e12) {
      throw NumericFailure("simulate: divergent dynamics", t);
    }
  }

  TimeSeriesPanel panel = make_panel(path.bottomRows(t_len));
  if (scales > 1) {
    panel.series_names.clear();
    for (int scale = 1; scale <= scales; ++scale) {
      for (int i = 1; i <= n; ++i) {
        panel.series_names.push_back("y" + std::to_string(i) + "@s" +
                                     std::to_string(scale));
      }
    }
  }
  return panel;
}

double sparsity_for(int series) {
  const std::pair<int, double> pairs[] = {
      {10, 0.80}, {30, 0.85}, {50, 0.90}, {100, 0.95}};
  double best = pairs[0].second;
  int best_dist = std::abs(series - pairs[0].first);
  for (const auto& [n, s] : pairs) {
    const int dist = std::abs(series - n);
    if (dist < best_dist) {
      best_dist = dist;
      best = s;
    }
  }
  return best;
}

std::vector<GridEntry> experiment_grid(const GridSpec& spec,
                                       const std::filesystem::path& out_dir,
                                       int jobs) {
  if (spec.replicates < 1) {
    throw std::invalid_argument("experiment_grid: replicates must be >= 1");
  }
  std::filesystem::create_directories(out_dir);

  std::vector<GridEntry> entries;
  std::uint64_t cell_index = 0;
  for (long t : spec.t_values) {
    for (int n : spec.n_values) {
      for (double p : spec.p_values) {
        for (int rep = 1; rep <= spec.replicates; ++rep) {
          GridEntry entry;
          entry.t = t;
          entry.n = n;
          entry.p = p;
          entry.sparsity = spec.sparsity_override.value_or(sparsity_for(n));
          entry.lags = spec.lags;
          entry.replicate = rep;
          entry.seed = derive_seed(spec.master_seed, cell_index,
                                   static_cast<std::uint64_t>(rep));
          entry.tag = "t" + std::to_string(t) + "_n" + std::to_string(n) +
                      "_p" + format_compact(p) + "_rep" + std::to_string(rep);
          entries.push_back(std::move(entry));
        }
        ++cell_index;
      }
    }
  }

  parallel_for(static_cast<long>(entries.size()), jobs, [&](long idx) {
    GridEntry& entry = entries[static_cast<size_t>(idx)];
    const std::filesystem::path dir = out_dir / entry.tag;
    std::filesystem::create_directories(dir);

    StructureConfig config;
    config.series = entry.n;
    config.lags = entry.lags;
    config.sparsity = entry.sparsity;
    config.noise_p = entry.p;
    config.weight_min = spec.weight_min;
    config.weight_max = spec.weight_max;
    const GroundTruth truth = generate_structure(config, entry.seed);
    const TimeSeriesPanel panel =
        simulate(truth, entry.t, derive_seed(entry.seed, 0x5eed));

    const std::filesystem::path data_path = dir / "data.csv";
    write_panel_csv(data_path, panel);
    entry.data_path = data_path.string();
    for (const auto& path :
         write_stack_blocks(dir, "truth", truth.weights, panel.series_names)) {
      entry.truth_paths.push_back(path.string());
    }
  });
  return entries;
}

std::string grid_entry_json(const GridEntry& entry) {
  nlohmann::json j;
  j["tag"] = entry.tag;
  j["t"] = entry.t;
  j["n"] = entry.n;
  j["p"] = entry.p;
  j["sparsity"] = entry.sparsity;
  j["lags"] = entry.lags;
  j["replicate"] = entry.replicate;
  j["seed"] = entry.seed;
  j["data"] = entry.data_path;
  j["truth"] = entry.truth_paths;
  return j.dump();
}

}  // namespace mscastle
