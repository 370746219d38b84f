#pragma once

#include <stdexcept>
#include <string>

namespace proxybench {

// Error categories map to CLI exit codes: config 2, data 3, numeric 4.

// Invalid or inconsistent run configuration (flags, config file).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or invalid input data (CSV schema, gaps, duplicates, masks).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Failures arising during computation: zero variance, rank deficiency,
// non-convergence, singular covariance, degenerate holdouts.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace proxybench
