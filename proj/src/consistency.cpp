#include "proxybench/consistency.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>
#include <string>

#include "proxybench/errors.hpp"

namespace proxybench {

namespace {

constexpr double kZeroResponse = 1e-12;  // alpha below this counts as no response

double critical_value(int q, int calib_size, double confidence, QuantileKind quantile) {
  if (!(confidence > 0.0) || !(confidence < 1.0)) {
    throw ConfigError("confidence level must be in (0, 1)");
  }
  if (quantile == QuantileKind::chi_squared) {
    boost::math::chi_squared dist(static_cast<double>(q));
    return boost::math::quantile(dist, confidence);
  }
  const int df2 = calib_size - 2;
  if (df2 < 1) throw ConfigError("small-sample quantile needs at least 3 calibration years");
  boost::math::fisher_f dist(static_cast<double>(q), static_cast<double>(df2));
  return static_cast<double>(q) * boost::math::quantile(dist, confidence);
}

int century_start(int year) {
  // Floor toward negative infinity so years like -50 land in century -100.
  const int c = year / 100;
  return (year % 100 < 0 ? c - 1 : c) * 100;
}

}  // namespace

const char* to_string(SetKind kind) {
  switch (kind) {
    case SetKind::interval: return "interval";
    case SetKind::empty: return "empty";
    case SetKind::unbounded: return "unbounded";
  }
  throw ConfigError("unknown consistency set kind");
}

CalibrationFit fit_calibration(const ProxyNetwork& net, const TargetSeries& target,
                               const std::vector<int>& calib_years, CovarianceMode mode) {
  const int n = static_cast<int>(calib_years.size());
  if (n < 3) throw ConfigError("calibration regression needs at least 3 years");

  CalibrationFit fit;
  fit.calib_size = n;
  for (int j = 0; j < net.n_proxies(); ++j) {
    if (net.column_complete(j, calib_years)) {
      fit.proxies.push_back(j);
      fit.ids.push_back(net.ids[static_cast<std::size_t>(j)]);
    }
  }
  const int q = static_cast<int>(fit.proxies.size());
  if (q == 0) throw DataError("no proxy column is complete over the calibration period");

  Eigen::VectorXd x(n);
  for (int r = 0; r < n; ++r) x(r) = target.at_year(calib_years[static_cast<std::size_t>(r)]);
  const double x_mean = x.mean();
  const double sxx = (x.array() - x_mean).square().sum();
  if (sxx <= 0.0) throw NumericError("target is constant over the calibration period");

  fit.slope.resize(q);
  fit.intercept.resize(q);
  Eigen::MatrixXd residuals(n, q);
  for (int jj = 0; jj < q; ++jj) {
    const int col = fit.proxies[static_cast<std::size_t>(jj)];
    Eigen::VectorXd yj(n);
    for (int r = 0; r < n; ++r) {
      yj(r) = net.values(net.axis.index_of(calib_years[static_cast<std::size_t>(r)]), col);
    }
    const double y_mean = yj.mean();
    const double sxy = ((x.array() - x_mean) * (yj.array() - y_mean)).sum();
    const double b = sxy / sxx;
    const double a = y_mean - b * x_mean;
    fit.slope(jj) = b;
    fit.intercept(jj) = a;
    residuals.col(jj) = yj - Eigen::VectorXd::Constant(n, a) - b * x;
  }

  // Full covariance needs enough years to invert; otherwise fall back.
  fit.mode = (mode == CovarianceMode::full && n > q + 2) ? CovarianceMode::full
                                                         : CovarianceMode::diagonal;
  if (fit.mode == CovarianceMode::full) {
    fit.residual_cov = residuals.transpose() * residuals / static_cast<double>(n - 2);
    const Eigen::LLT<Eigen::MatrixXd> llt(fit.residual_cov);
    if (llt.info() != Eigen::Success) {
      throw NumericError(
          "full residual covariance is singular; remove duplicated proxies or use diagonal mode");
    }
  } else {
    fit.residual_cov = Eigen::MatrixXd::Zero(q, q);
    for (int jj = 0; jj < q; ++jj) {
      fit.residual_cov(jj, jj) = residuals.col(jj).squaredNorm() / static_cast<double>(n - 2);
    }
  }

  // A residual variance of zero would make the precision weight infinite, so
  // floor it and flag the proxy as an exact linear function of the target.
  double max_var = 0.0;
  for (int jj = 0; jj < q; ++jj) max_var = std::max(max_var, fit.residual_cov(jj, jj));
  const double floor_var = max_var > 0.0 ? 1e-12 * max_var : 1.0;
  fit.zero_residual.assign(static_cast<std::size_t>(q), 0);
  for (int jj = 0; jj < q; ++jj) {
    if (fit.residual_cov(jj, jj) < floor_var) {
      fit.zero_residual[static_cast<std::size_t>(jj)] = 1;
      fit.residual_cov(jj, jj) = floor_var;
    }
  }
  return fit;
}

ConsistencySet consistency_set(const CalibrationFit& fit, const Eigen::VectorXd& proxy_row,
                               double confidence, QuantileKind quantile) {
  const int q = static_cast<int>(fit.proxies.size());
  if (proxy_row.size() != q) {
    throw ConfigError("proxy row length does not match the calibration fit");
  }
  const double c = critical_value(q, fit.calib_size, confidence, quantile);
  const Eigen::VectorXd r = proxy_row - fit.intercept;

  // Q(xi) = gamma - 2 beta xi + alpha xi^2 in precision-weighted moments.
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  if (fit.mode == CovarianceMode::diagonal) {
    for (int j = 0; j < q; ++j) {
      const double w = 1.0 / fit.residual_cov(j, j);
      alpha += fit.slope(j) * fit.slope(j) * w;
      beta += fit.slope(j) * r(j) * w;
      gamma += r(j) * r(j) * w;
    }
  } else {
    const Eigen::LLT<Eigen::MatrixXd> llt(fit.residual_cov);
    if (llt.info() != Eigen::Success) {
      throw NumericError("residual covariance is not positive definite");
    }
    const Eigen::VectorXd wb = llt.solve(fit.slope);
    const Eigen::VectorXd wr = llt.solve(r);
    alpha = fit.slope.dot(wb);
    beta = fit.slope.dot(wr);
    gamma = r.dot(wr);
  }

  ConsistencySet set;
  if (alpha < kZeroResponse) {
    // The proxies carry no usable response; Q is flat in xi, so the set is
    // everything or nothing depending on the offset alone.
    set.degenerate = true;
    set.statistic_min = alpha > 0.0 ? gamma - beta * beta / alpha : gamma;
    set.kind = set.statistic_min <= c ? SetKind::unbounded : SetKind::empty;
    return set;
  }
  set.statistic_min = gamma - beta * beta / alpha;
  if (set.statistic_min > c) {
    set.kind = SetKind::empty;
    return set;
  }
  const double center = beta / alpha;
  const double half = std::sqrt(std::max(0.0, c - set.statistic_min) / alpha);
  set.kind = SetKind::interval;
  set.lo = center - half;
  set.hi = center + half;
  return set;
}

ConsistencyProfile backcast_consistency_profile(const CalibrationFit& fit,
                                                const ProxyNetwork& net,
                                                const std::vector<int>& years, double confidence,
                                                QuantileKind quantile) {
  const int q = static_cast<int>(fit.proxies.size());
  ConsistencyProfile profile;
  Eigen::VectorXd row(q);
  for (int year : years) {
    bool available = net.axis.contains(year);
    if (available) {
      const int t = net.axis.index_of(year);
      for (int jj = 0; jj < q && available; ++jj) {
        available = net.mask(t, fit.proxies[static_cast<std::size_t>(jj)]);
      }
      if (available) {
        for (int jj = 0; jj < q; ++jj) {
          row(jj) = net.values(t, fit.proxies[static_cast<std::size_t>(jj)]);
        }
      }
    }
    if (!available) {
      profile.skipped_years.push_back(year);
      continue;
    }
    ConsistencySet set = consistency_set(fit, row, confidence, quantile);
    set.year = year;
    auto& counts = profile.century_counts[century_start(year)];
    counts[static_cast<std::size_t>(set.kind)] += 1;
    profile.sets.push_back(set);
  }
  return profile;
}

}  // namespace proxybench
