#pragma once

#include <span>
#include <string>
#include <vector>

#include "proxybench/models.hpp"
#include "proxybench/preprocess.hpp"

namespace proxybench {

double rmse(std::span<const double> pred, std::span<const double> truth);

// RE = 1 - rmse_model / rmse_intercept. Throws NumericError when
// rmse_intercept is zero (degenerate holdout).
double re_statistic(double rmse_model, double rmse_intercept);

struct HoldoutResult {
  SplitSpec split;
  double rmse_model = 0.0;
  double rmse_intercept = 0.0;
  double re = 0.0;
  bool degenerate = false;  // rmse_intercept == 0; re is meaningless
  std::string method;
};

// For every contiguous holdout window of the instrumental overlap: fit the
// method and the intercept model on the complement, predict the window, and
// record both RMSEs and the RE. The intercept denominator is refit per split.
// Results are ordered by holdout_start. threads > 1 evaluates splits
// concurrently (deterministic output either way).
std::vector<HoldoutResult> holdout_sweep(const ProxyNetwork& net, const TargetSeries& target,
                                         const MethodSpec& method, int holdout_length,
                                         int threads = 1);

// Boxplot five-number summary plus mean.
struct DistributionSummary {
  int count = 0;
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0, mean = 0.0;
};

// Quartiles use linear interpolation between order statistics.
DistributionSummary summarize(std::vector<double> values);

struct PositionSummary {
  DistributionSummary endpoint_re, interior_re;
  DistributionSummary endpoint_rmse, interior_rmse;
  int degenerate_excluded = 0;
};

PositionSummary summarize_by_position(const std::vector<HoldoutResult>& results);

}  // namespace proxybench
