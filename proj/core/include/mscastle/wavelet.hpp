#ifndef MSCASTLE_WAVELET_HPP_
#define MSCASTLE_WAVELET_HPP_

#include <string>

#include "mscastle/types.hpp"

namespace mscastle {

enum class WaveletFamily { kHaar, kDaubechies4, kSymlet8 };

enum class FilterNormalization { kOrthonormal, kModwt };

WaveletFamily wavelet_family_from_string(const std::string& name);
std::string to_string(WaveletFamily family);

// An orthogonal scaling/wavelet filter pair. In the orthonormal convention
// the scaling taps g satisfy sum g = sqrt(2), sum g^2 = 1 and even-shift
// orthogonality; the wavelet taps are the quadrature mirror
// h_k = (-1)^k g_{M-1-k}. The modwt convention divides every tap by sqrt(2),
// which is what makes per-scale energy add up to the input energy.
struct FilterPair {
  Vector scaling_taps;
  Vector wavelet_taps;
  WaveletFamily family;
  FilterNormalization normalization;

  int length() const { return static_cast<int>(scaling_taps.size()); }
  FilterPair to_modwt() const;
};

// Returns the orthonormal filter pair for a family; throws
// std::invalid_argument for anything unsupported.
FilterPair filter_bank(WaveletFamily family);
FilterPair filter_bank(const std::string& family_name);

// Non-decimated (translation invariant) decomposition output. Column block
// d*N..(d+1)*N of `details` holds the scale-(d+1) detail coefficients of all
// N series; `smooth` is the level-D approximation, kept for energy
// diagnostics and excluded from any regression design.
struct ScaleAugmentedPanel {
  Matrix details;  // T x (D*N)
  Matrix smooth;   // T x N
  int levels = 0;
  std::vector<std::string> series_names;

  long rows() const { return details.rows(); }
  long series_count() const { return smooth.cols(); }
  Eigen::Block<const Matrix> scale_block(int scale) const {  // scale in 1..D
    const long n = series_count();
    return details.block(0, (scale - 1) * n, details.rows(), n);
  }
};

// A trous pyramid with circular boundary handling at every level. Filters are
// applied in modwt normalization regardless of the normalization of the
// argument. Levels must satisfy 1 <= levels <= floor(log2(T)); the first
// M*2^{D-1} coefficients of each level are contaminated by wrap-around.
ScaleAugmentedPanel swt_decompose(const TimeSeriesPanel& panel, int levels,
                                  const FilterPair& filter);

// Per-series energy shares: rows = series, columns = scale 1..D then smooth.
// Shares of each row sum to 1 (exactly, up to rounding) for orthogonal
// families under modwt normalization.
Matrix variance_partition(const ScaleAugmentedPanel& aug,
                          const TimeSeriesPanel& original);

// Sample correlation between the detail series of two scales, reported as a
// diagnostic: non-decimated details of different scales are close to, but
// not exactly, orthogonal.
Matrix scale_correlation_matrix(const ScaleAugmentedPanel& aug, long series);

}  // namespace mscastle

#endif  // MSCASTLE_WAVELET_HPP_
