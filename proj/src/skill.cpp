#include "proxybench/skill.hpp"

#include <algorithm>
#include <cmath>

#include "proxybench/errors.hpp"
#include "proxybench/lasso.hpp"
#include "proxybench/parallel.hpp"

namespace proxybench {

namespace {

// Proxy values and target restricted to the instrumental overlap, with rows
// in year order. Axes are consecutive, so overlap rows are contiguous.
struct OverlapData {
  YearAxis axis;
  Eigen::MatrixXd X;  // overlap years x proxies, raw values
  Eigen::VectorXd y;
};

OverlapData gather_overlap(const ProxyNetwork& net, const TargetSeries& target) {
  const auto overlap = intersect(net.axis, target.axis);
  if (!overlap) throw DataError("proxy network and target do not overlap in time");
  OverlapData d;
  d.axis = *overlap;
  const int row0 = net.axis.index_of(overlap->start_year);
  d.X = net.values.middleRows(row0, overlap->length);
  d.y.resize(overlap->length);
  for (int t = 0; t < overlap->length; ++t) {
    d.y(t) = target.at_year(overlap->start_year + t);
  }
  return d;
}

// Rethrows the estimator error with the offending split attached, keeping the
// original error category so exit codes stay meaningful.
[[noreturn]] void rethrow_with_split(const SplitSpec& split, const std::exception& e) {
  const std::string context = "holdout window starting " +
                              std::to_string(split.holdout_start) + ": " + e.what();
  if (dynamic_cast<const ConfigError*>(&e)) throw ConfigError(context);
  if (dynamic_cast<const DataError*>(&e)) throw DataError(context);
  throw NumericError(context);
}

HoldoutResult finish_result(const SplitSpec& split, double rmse_model, double rmse_intercept,
                            const std::string& tag) {
  HoldoutResult r;
  r.split = split;
  r.rmse_model = rmse_model;
  r.rmse_intercept = rmse_intercept;
  r.method = tag;
  if (rmse_intercept == 0.0) {
    r.degenerate = true;
    r.re = 0.0;
  } else {
    r.re = re_statistic(rmse_model, rmse_intercept);
  }
  return r;
}

// Direct path: refit the method and the intercept model per split through the
// ordinary fitting interface. Works for every method and missingness pattern.
std::vector<HoldoutResult> sweep_generic(const ProxyNetwork& net, const TargetSeries& target,
                                         const MethodSpec& method, const YearAxis& overlap,
                                         const std::vector<SplitSpec>& splits, int threads) {
  std::vector<HoldoutResult> results(splits.size());
  const std::string tag = method_tag(method);
  parallel_for(static_cast<int>(splits.size()), threads, [&](int s) {
    const SplitSpec& split = splits[static_cast<std::size_t>(s)];
    try {
      const std::vector<int> calib = calibration_years(overlap, split);
      const std::vector<int> hold = holdout_years(split);
      const ReconstructionModel model = fit_model(method, net, target, calib);
      const ReconstructionModel base = fit_intercept(target, calib);
      const Backcast cast = predict(model, net, hold);
      std::vector<double> truth(hold.size());
      std::vector<double> base_pred(hold.size(), base.intercept);
      for (std::size_t i = 0; i < hold.size(); ++i) truth[i] = target.at_year(hold[i]);
      results[static_cast<std::size_t>(s)] =
          finish_result(split, rmse(cast.values, truth), rmse(base_pred, truth), tag);
    } catch (const std::exception& e) {
      rethrow_with_split(split, e);
    }
  });
  return results;
}

// Fast path for complete networks and fixed-lambda lasso (or the intercept
// method): per-split calibration moments come from prefix-sum differences, so
// assembling the standardized Gram system costs O(p^2) per split instead of
// O(n p^2). Agrees with the direct path to floating-point accumulation error.
std::vector<HoldoutResult> sweep_fast(const OverlapData& d, const MethodSpec& method,
                                      const std::vector<SplitSpec>& splits, int threads) {
  const int N = static_cast<int>(d.X.rows());
  const int p = static_cast<int>(d.X.cols());
  const int L = splits.front().holdout_length;
  const std::string tag = method_tag(method);
  const bool is_lasso = method.method == Method::lasso;

  // Prefix sums over overlap rows: cum*(t) holds the sum of rows [0, t).
  std::vector<double> cum_x(static_cast<std::size_t>((N + 1) * p), 0.0);
  std::vector<double> cum_xy(static_cast<std::size_t>((N + 1) * p), 0.0);
  std::vector<double> cum_y(static_cast<std::size_t>(N + 1), 0.0);
  std::vector<double> cum_y2(static_cast<std::size_t>(N + 1), 0.0);
  std::vector<double> cum_xx;  // p x p blocks, filled only for the lasso
  if (is_lasso) cum_xx.assign(static_cast<std::size_t>(N + 1) * p * p, 0.0);
  for (int t = 0; t < N; ++t) {
    const double yt = d.y(t);
    cum_y[static_cast<std::size_t>(t + 1)] = cum_y[static_cast<std::size_t>(t)] + yt;
    cum_y2[static_cast<std::size_t>(t + 1)] = cum_y2[static_cast<std::size_t>(t)] + yt * yt;
    for (int j = 0; j < p; ++j) {
      const std::size_t at = static_cast<std::size_t>((t + 1) * p + j);
      const std::size_t prev = static_cast<std::size_t>(t * p + j);
      cum_x[at] = cum_x[prev] + d.X(t, j);
      cum_xy[at] = cum_xy[prev] + d.X(t, j) * yt;
    }
    if (is_lasso) {
      const std::size_t base = static_cast<std::size_t>(t + 1) * p * p;
      const std::size_t prev = static_cast<std::size_t>(t) * p * p;
      for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
          cum_xx[base + static_cast<std::size_t>(i * p + j)] =
              cum_xx[prev + static_cast<std::size_t>(i * p + j)] + d.X(t, i) * d.X(t, j);
        }
      }
    }
  }

  auto eval_split = [&](const SplitSpec& split) -> HoldoutResult {
    const int s = d.axis.index_of(split.holdout_start);
    const int m = N - L;
    if (m < 1) throw NumericError("holdout split leaves no calibration years");

    // Calibration moments = totals minus the holdout window.
    const double y_sum = cum_y[static_cast<std::size_t>(N)] -
                         (cum_y[static_cast<std::size_t>(s + L)] - cum_y[static_cast<std::size_t>(s)]);
    const double y_bar = y_sum / m;

    Eigen::VectorXd coef;
    Eigen::VectorXd mu(p), sd(p);
    if (is_lasso) {
      if (m < 2) throw NumericError("calibration period is too short to standardize");
      for (int j = 0; j < p; ++j) {
        const double sum = cum_x[static_cast<std::size_t>(N * p + j)] -
                           (cum_x[static_cast<std::size_t>((s + L) * p + j)] -
                            cum_x[static_cast<std::size_t>(s * p + j)]);
        mu(j) = sum / m;
      }
      const std::size_t tot = static_cast<std::size_t>(N) * p * p;
      const std::size_t win_hi = static_cast<std::size_t>(s + L) * p * p;
      const std::size_t win_lo = static_cast<std::size_t>(s) * p * p;
      Eigen::MatrixXd centered(p, p);
      for (int i = 0; i < p; ++i) {
        for (int j = i; j < p; ++j) {
          const std::size_t at = static_cast<std::size_t>(i * p + j);
          const double cross = cum_xx[tot + at] - (cum_xx[win_hi + at] - cum_xx[win_lo + at]);
          const double c = cross - m * mu(i) * mu(j);
          centered(i, j) = c;
          centered(j, i) = c;
        }
      }
      for (int j = 0; j < p; ++j) {
        const double var = centered(j, j) / (m - 1);
        if (!(var > 0.0)) {
          throw NumericError("a proxy column is constant over a calibration period");
        }
        sd(j) = std::sqrt(var);
      }
      Eigen::MatrixXd gram(p, p);
      Eigen::VectorXd xty(p);
      for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) gram(i, j) = centered(i, j) / (sd(i) * sd(j));
      }
      for (int j = 0; j < p; ++j) {
        const double xy = cum_xy[static_cast<std::size_t>(N * p + j)] -
                          (cum_xy[static_cast<std::size_t>((s + L) * p + j)] -
                           cum_xy[static_cast<std::size_t>(s * p + j)]);
        xty(j) = (xy - m * mu(j) * y_bar) / sd(j);
      }
      const double y_sq = cum_y2[static_cast<std::size_t>(N)] -
                          (cum_y2[static_cast<std::size_t>(s + L)] -
                           cum_y2[static_cast<std::size_t>(s)]) -
                          m * y_bar * y_bar;
      coef = lasso_solve_gram(gram, xty, y_bar, y_sq, m, *method.lambda).coefficients;
    }

    double sse_model = 0.0;
    double sse_base = 0.0;
    for (int t = s; t < s + L; ++t) {
      double pred = y_bar;
      if (is_lasso) {
        for (int j = 0; j < p; ++j) pred += coef(j) * (d.X(t, j) - mu(j)) / sd(j);
      }
      const double err = pred - d.y(t);
      const double base_err = y_bar - d.y(t);
      sse_model += err * err;
      sse_base += base_err * base_err;
    }
    return finish_result(split, std::sqrt(sse_model / L), std::sqrt(sse_base / L), tag);
  };

  std::vector<HoldoutResult> results(splits.size());
  parallel_for(static_cast<int>(splits.size()), threads, [&](int s_idx) {
    const SplitSpec& split = splits[static_cast<std::size_t>(s_idx)];
    try {
      results[static_cast<std::size_t>(s_idx)] = eval_split(split);
    } catch (const std::exception& e) {
      rethrow_with_split(split, e);
    }
  });
  return results;
}

}  // namespace

double rmse(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) throw ConfigError("rmse: length mismatch");
  if (pred.empty()) throw ConfigError("rmse: empty input");
  double sse = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double err = pred[i] - truth[i];
    sse += err * err;
  }
  return std::sqrt(sse / static_cast<double>(pred.size()));
}

double re_statistic(double rmse_model, double rmse_intercept) {
  if (rmse_intercept == 0.0) {
    throw NumericError("re_statistic: intercept model fits the holdout exactly");
  }
  return 1.0 - rmse_model / rmse_intercept;
}

std::vector<HoldoutResult> holdout_sweep(const ProxyNetwork& net, const TargetSeries& target,
                                         const MethodSpec& method, int holdout_length,
                                         int threads) {
  const OverlapData d = gather_overlap(net, target);
  const std::vector<SplitSpec> splits = enumerate_splits(d.axis, holdout_length);

  bool fast = method.method == Method::intercept ||
              (method.method == Method::lasso && method.lambda.has_value());
  if (fast && method.method == Method::lasso) {
    const std::vector<int> years = d.axis.years();
    for (int j = 0; j < net.n_proxies() && fast; ++j) {
      fast = net.column_complete(j, years);
    }
  }
  if (fast) return sweep_fast(d, method, splits, threads);
  return sweep_generic(net, target, method, d.axis, splits, threads);
}

DistributionSummary summarize(std::vector<double> values) {
  DistributionSummary s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const auto quantile = [&](double q) {
    const double h = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
  };
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  return s;
}

PositionSummary summarize_by_position(const std::vector<HoldoutResult>& results) {
  std::vector<double> end_re, int_re, end_rmse, int_rmse;
  PositionSummary summary;
  for (const auto& r : results) {
    const bool endpoint = r.split.position == WindowPosition::endpoint;
    (endpoint ? end_rmse : int_rmse).push_back(r.rmse_model);
    if (r.degenerate) {
      ++summary.degenerate_excluded;
      continue;
    }
    (endpoint ? end_re : int_re).push_back(r.re);
  }
  summary.endpoint_re = summarize(std::move(end_re));
  summary.interior_re = summarize(std::move(int_re));
  summary.endpoint_rmse = summarize(std::move(end_rmse));
  summary.interior_rmse = summarize(std::move(int_rmse));
  return summary;
}

}  // namespace proxybench
