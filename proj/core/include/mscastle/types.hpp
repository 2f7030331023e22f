#ifndef MSCASTLE_TYPES_HPP_
#define MSCASTLE_TYPES_HPP_

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mscastle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

// A T x N panel of observations: one column per series, one row per time step.
// Timestamps are kept verbatim (string) so file round-trips are lossless.
struct TimeSeriesPanel {
  Matrix values;
  std::vector<std::string> series_names;
  std::vector<std::string> timestamps;

  long rows() const { return values.rows(); }
  long cols() const { return values.cols(); }
};

// Builds a panel with default names y1..yN and an integer time index.
inline TimeSeriesPanel make_panel(const Matrix& values) {
  TimeSeriesPanel panel;
  panel.values = values;
  panel.series_names.reserve(values.cols());
  for (long j = 0; j < values.cols(); ++j) {
    panel.series_names.push_back("y" + std::to_string(j + 1));
  }
  panel.timestamps.reserve(values.rows());
  for (long t = 0; t < values.rows(); ++t) {
    panel.timestamps.push_back(std::to_string(t));
  }
  return panel;
}

}  // namespace mscastle

#endif  // MSCASTLE_TYPES_HPP_
