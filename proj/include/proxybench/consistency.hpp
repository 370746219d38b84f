#pragma once

#include <Eigen/Dense>
#include <map>
#include <array>
#include <optional>
#include <vector>

#include "proxybench/series.hpp"

namespace proxybench {

enum class CovarianceMode { diagonal, full };
enum class QuantileKind { chi_squared, f_small_sample };

// Per-proxy regressions of proxy on target over the calibration years, with a
// residual covariance estimate (diagonal by default; full mode requires
// calib_size > n_proxies + 2 and otherwise falls back to diagonal).
struct CalibrationFit {
  std::vector<int> proxies;  // network column indices
  std::vector<std::string> ids;
  Eigen::VectorXd slope;      // proxy units per degree C
  Eigen::VectorXd intercept;  // proxy units
  Eigen::MatrixXd residual_cov;
  CovarianceMode mode = CovarianceMode::diagonal;
  int calib_size = 0;
  std::vector<std::uint8_t> zero_residual;  // residual variance ~ 0 (degenerate fit)
};

CalibrationFit fit_calibration(const ProxyNetwork& net, const TargetSeries& target,
                               const std::vector<int>& calib_years,
                               CovarianceMode mode = CovarianceMode::diagonal);

enum class SetKind { interval, empty, unbounded };

const char* to_string(SetKind kind);

// Confidence set for the single target value consistent with one proxy row:
// {xi : Q(xi) <= c} for Q(xi) = (y - a - b xi)' Sigma^-1 (y - a - b xi).
struct ConsistencySet {
  int year = 0;
  double statistic_min = 0.0;  // min over xi of Q
  SetKind kind = SetKind::interval;
  std::optional<double> lo, hi;  // degrees C; set only for intervals
  bool degenerate = false;       // response vector numerically zero
};

// c is the chi-square quantile with q = n_proxies degrees of freedom at the
// given confidence, or q * F(q, calib_size - 2) in small-sample mode.
// Classification: interval when the quadratic opens upward and min Q <= c;
// empty when min Q > c; unbounded only when b' Sigma^-1 b < 1e-12 with
// min Q <= c.
ConsistencySet consistency_set(const CalibrationFit& fit, const Eigen::VectorXd& proxy_row,
                               double confidence,
                               QuantileKind quantile = QuantileKind::chi_squared);

struct ConsistencyProfile {
  std::vector<ConsistencySet> sets;
  std::vector<int> skipped_years;  // requested years lacking full availability
  // century start year -> {interval, empty, unbounded} counts
  std::map<int, std::array<int, 3>> century_counts;
};

// One ConsistencySet per requested year with full availability of the fitted
// proxies; other years are skipped and listed.
ConsistencyProfile backcast_consistency_profile(const CalibrationFit& fit,
                                                const ProxyNetwork& net,
                                                const std::vector<int>& years, double confidence,
                                                QuantileKind quantile = QuantileKind::chi_squared);

}  // namespace proxybench
