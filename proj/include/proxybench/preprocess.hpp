#pragma once

#include <vector>

#include "proxybench/series.hpp"

namespace proxybench {

struct DedupResult {
  ProxyNetwork network;
  std::vector<std::string> removed;
};

// Among columns pairwise correlated at |r| = 1 (within 1e-12) on the overlap,
// keep only the first by column order and report the rest as removed.
// Correlation is computed over years where both columns are available.
DedupResult dedup_columns(const ProxyNetwork& net, const YearAxis& overlap);

struct ScaleParams {
  double mean = 0.0;
  double sd = 1.0;
};

// Per-column affine transform fitted on calibration years; the inverse
// recovers raw values.
struct Standardization {
  std::vector<ScaleParams> columns;

  double to_standard(int j, double raw) const {
    const auto& p = columns[static_cast<std::size_t>(j)];
    return (raw - p.mean) / p.sd;
  }
  double to_raw(int j, double standardized) const {
    const auto& p = columns[static_cast<std::size_t>(j)];
    return standardized * p.sd + p.mean;
  }
};

struct StandardizeResult {
  ProxyNetwork network;
  Standardization params;
};

// Column mean and sample standard deviation (divisor n-1) over a column's
// available calibration years. Throws NumericError for columns with fewer
// than two available calibration years or zero variance.
ScaleParams column_scale(const ProxyNetwork& net, int column, const std::vector<int>& calib_years);

// Standardize every column to mean 0 / sd 1 over its available calibration
// years; the whole column (all years) is transformed with the same params.
StandardizeResult standardize(const ProxyNetwork& net, const std::vector<int>& calib_years);

enum class WindowPosition { endpoint, interior };

const char* to_string(WindowPosition position);

// A contiguous holdout window inside an instrumental axis; the complement of
// the window is the calibration set.
struct SplitSpec {
  int holdout_start = 0;
  int holdout_length = 0;
  WindowPosition position = WindowPosition::interior;
};

// All contiguous windows of the given length: axis.length - holdout_length + 1
// splits, tagged endpoint when the window touches the first or last year.
std::vector<SplitSpec> enumerate_splits(const YearAxis& axis, int holdout_length);

std::vector<int> holdout_years(const SplitSpec& split);
std::vector<int> calibration_years(const YearAxis& axis, const SplitSpec& split);

}  // namespace proxybench
