#pragma once

#include <stdexcept>
#include <string>

namespace psdo {

// Rank, cutoff, or dimension mismatch between operands.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A parameter outside its documented range (cutoffs, grid sizes, orders).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An iterative kernel did not converge. Carries the last iterate.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, double last_estimate)
      : std::runtime_error(what), last_estimate_(last_estimate) {}

  double last_estimate() const noexcept { return last_estimate_; }

 private:
  double last_estimate_;
};

// Malformed serialized input.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace psdo
