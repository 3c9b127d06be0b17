#pragma once

#include <stdexcept>
#include <string>

namespace godec {

// Shape mismatch or zero-sized operand.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the operation's domain (rank out of range, negative
// threshold, violated bound hypothesis, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// NaN or Inf reached a DenseMatrix.
class NonFiniteError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed file content (CSV, f64le, PGM).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace godec
