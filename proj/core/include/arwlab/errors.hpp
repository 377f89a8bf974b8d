#pragma once

#include <stdexcept>
#include <string>

namespace arw {

// Order-6 correlation count requested on a level larger than the configured cap.
class CapExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A zero-finder cell whose winding or Newton refinement could not be resolved.
class UnresolvedCellError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Gaussian conditioning attempted where 1 - r^2 is numerically zero,
// or a conditional covariance came out indefinite.
class ConditioningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Persisted report with an unknown schema or malformed content.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace arw
