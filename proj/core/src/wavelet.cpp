#include "mscastle/wavelet.hpp"

#include <cmath>
#include <stdexcept>

#include "mscastle/errors.hpp"

namespace mscastle {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Orthonormal scaling taps. Haar and Daubechies-4 are closed form; the
// 8-tap least-asymmetric (symlet) taps are the standard published values.
// All three are checked against the orthonormality identities in the tests.
Vector scaling_taps_for(WaveletFamily family) {
  switch (family) {
    case WaveletFamily::kHaar: {
      Vector g(2);
      g << 1.0 / kSqrt2, 1.0 / kSqrt2;
      return g;
    }
    case WaveletFamily::kDaubechies4: {
      const double s3 = std::sqrt(3.0);
      Vector g(4);
      g << (1.0 + s3) / (4.0 * kSqrt2), (3.0 + s3) / (4.0 * kSqrt2),
          (3.0 - s3) / (4.0 * kSqrt2), (1.0 - s3) / (4.0 * kSqrt2);
      return g;
    }
    case WaveletFamily::kSymlet8: {
      Vector g(8);
      g << -0.075765714789273325, -0.029635527645998951, 0.49761866763201545,
          0.80373875180591614, 0.29785779560527736, -0.099219543576847216,
          -0.012603967262037833, 0.032223100604042702;
      return g;
    }
  }
  throw std::invalid_argument("unknown wavelet family");
}

// Quadrature mirror: h_k = (-1)^k g_{M-1-k}.
Vector mirror(const Vector& g) {
  const int m = static_cast<int>(g.size());
  Vector h(m);
  for (int k = 0; k < m; ++k) {
    h[k] = ((k % 2 == 0) ? 1.0 : -1.0) * g[m - 1 - k];
  }
  return h;
}

// One circular a-trous filtering pass: out[t] = sum_k taps[k] * in[(t - step*k) mod T].
void circular_filter(const Eigen::Ref<const Matrix>& in, const Vector& taps,
                     long step, Matrix& out) {
  const long t_len = in.rows();
  const int m = static_cast<int>(taps.size());
  out.setZero(t_len, in.cols());
  for (int k = 0; k < m; ++k) {
    const long shift = (step * k) % t_len;
    if (shift == 0) {
      out += taps[k] * in;
    } else {
      out.topRows(shift) += taps[k] * in.bottomRows(shift);
      out.bottomRows(t_len - shift) += taps[k] * in.topRows(t_len - shift);
    }
  }
}

}  // namespace

WaveletFamily wavelet_family_from_string(const std::string& name) {
  if (name == "haar") return WaveletFamily::kHaar;
  if (name == "daubechies4" || name == "db4") return WaveletFamily::kDaubechies4;
  if (name == "symlet8" || name == "sym8") return WaveletFamily::kSymlet8;
  throw std::invalid_argument("unknown wavelet family: " + name);
}

std::string to_string(WaveletFamily family) {
  switch (family) {
    case WaveletFamily::kHaar: return "haar";
    case WaveletFamily::kDaubechies4: return "daubechies4";
    case WaveletFamily::kSymlet8: return "symlet8";
  }
  return "unknown";
}

FilterPair FilterPair::to_modwt() const {
  if (normalization == FilterNormalization::kModwt) return *this;
  FilterPair out = *this;
  out.scaling_taps /= kSqrt2;
  out.wavelet_taps /= kSqrt2;
  out.normalization = FilterNormalization::kModwt;
  return out;
}

FilterPair filter_bank(WaveletFamily family) {
  FilterPair pair;
  pair.scaling_taps = scaling_taps_for(family);
  pair.wavelet_taps = mirror(pair.scaling_taps);
  pair.family = family;
  pair.normalization = FilterNormalization::kOrthonormal;
  return pair;
}

FilterPair filter_bank(const std::string& family_name) {
  return filter_bank(wavelet_family_from_string(family_name));
}

ScaleAugmentedPanel swt_decompose(const TimeSeriesPanel& panel, int levels,
                                  const FilterPair& filter) {
  const long t_len = panel.rows();
  const long n = panel.cols();
  if (t_len < 2) throw std::invalid_argument("swt_decompose: need T >= 2");
  if (levels < 1) throw std::invalid_argument("swt_decompose: levels must be positive");
  const int max_levels = static_cast<int>(std::floor(std::log2(static_cast<double>(t_len))));
  if (levels > max_levels) {
    throw std::invalid_argument("swt_decompose: levels " + std::to_string(levels) +
                                " exceeds floor(log2(T)) = " + std::to_string(max_levels));
  }
  if (!panel.values.allFinite()) {
    throw InvalidDataError("swt_decompose: non-finite values in input panel");
  }
  if (!filter.scaling_taps.allFinite() || !filter.wavelet_taps.allFinite()) {
    throw std::invalid_argument("swt_decompose: non-finite filter taps");
  }

  const FilterPair taps = filter.to_modwt();

  ScaleAugmentedPanel out;
  out.levels = levels;
  out.series_names = panel.series_names;
  out.details.resize(t_len, levels * n);

  // Level-d pass uses step 2^{d-1}, i.e. 2^{d-1}-1 zeros between taps.
  Matrix approx = panel.values;
  Matrix detail(t_len, n);
  Matrix next(t_len, n);
  for (int level = 1; level <= levels; ++level) {
    const long step = 1L << (level - 1);
    circular_filter(approx, taps.wavelet_taps, step, detail);
    circular_filter(approx, taps.scaling_taps, step, next);
    out.details.block(0, (level - 1) * n, t_len, n) = detail;
    approx.swap(next);
  }
  out.smooth = approx;
  return out;
}

Matrix scale_correlation_matrix(const ScaleAugmentedPanel& aug, long series) {
  const long n = aug.series_count();
  if (series < 0 || series >= n) {
    throw std::invalid_argument("scale_correlation_matrix: series out of range");
  }
  const int levels = aug.levels;
  Matrix corr = Matrix::Identity(levels, levels);
  for (int a = 0; a < levels; ++a) {
    for (int b = a + 1; b < levels; ++b) {
      const auto da = aug.details.col(a * n + series);
      const auto db = aug.details.col(b * n + series);
      const double norm = da.norm() * db.norm();
      const double value = norm > 0.0 ? da.dot(db) / norm : 0.0;
      corr(a, b) = value;
      corr(b, a) = value;
    }
  }
  return corr;
}

Matrix variance_partition(const ScaleAugmentedPanel& aug,
                          const TimeSeriesPanel& original) {
  const long n = original.cols();
  const long t_len = original.rows();
  if (aug.series_count() != n || aug.rows() != t_len) {
    throw std::invalid_argument("variance_partition: shape mismatch");
  }
  const int levels = aug.levels;
  Matrix shares(n, levels + 1);
  for (long i = 0; i < n; ++i) {
    const double total = original.values.col(i).squaredNorm();
    if (total == 0.0) {
      // Degenerate all-zero series: by convention all energy in the smooth.
      shares.row(i).setZero();
      shares(i, levels) = 1.0;
      continue;
    }
    for (int d = 0; d < levels; ++d) {
      shares(i, d) = aug.details.col(d * n + i).squaredNorm() / total;
    }
    shares(i, levels) = aug.smooth.col(i).squaredNorm() / total;
  }
  return shares;
}

}  // namespace mscastle
