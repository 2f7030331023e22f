#ifndef MSCASTLE_ERRORS_HPP_
#define MSCASTLE_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <vector>

namespace mscastle {

// Input values that fail validation (non-finite samples, malformed files).
class InvalidDataError : public std::runtime_error {
 public:
  explicit InvalidDataError(const std::string& what) : std::runtime_error(what) {}
};

// A numeric breakdown mid-computation (divergent simulation, non-finite
// solver iterates). Carries the iteration / draw index when known.
class NumericFailure : public std::runtime_error {
 public:
  NumericFailure(const std::string& what, long index)
      : std::runtime_error(what + " (at index " + std::to_string(index) + ")"),
        index_(index) {}
  long index() const { return index_; }

 private:
  long index_;
};

// Every run of a lambda sweep failed to converge.
class SweepFailure : public std::runtime_error {
 public:
  explicit SweepFailure(const std::string& what) : std::runtime_error(what) {}
};

// The regularization-to-fitting ratio curve never enters the target window.
// Carries the observed curve so callers can report it.
class RangeNotFound : public std::runtime_error {
 public:
  RangeNotFound(const std::string& what, std::vector<double> lambdas,
                std::vector<double> ratios)
      : std::runtime_error(what),
        lambdas_(std::move(lambdas)),
        ratios_(std::move(ratios)) {}
  const std::vector<double>& lambdas() const { return lambdas_; }
  const std::vector<double>& ratios() const { return ratios_; }

 private:
  std::vector<double> lambdas_;
  std::vector<double> ratios_;
};

}  // namespace mscastle

#endif  // MSCASTLE_ERRORS_HPP_
