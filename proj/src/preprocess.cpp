#include "proxybench/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "proxybench/errors.hpp"

namespace proxybench {

namespace {

// Pearson correlation over years where both columns are available inside the
// overlap; nullopt when fewer than 2 common years or either side is constant.
std::optional<double> pairwise_correlation(const ProxyNetwork& net, int a, int b,
                                           const YearAxis& overlap) {
  double sa = 0, sb = 0;
  int n = 0;
  const int i0 = net.axis.index_of(overlap.start_year);
  const int i1 = net.axis.index_of(overlap.end_year());
  for (int i = i0; i <= i1; ++i) {
    if (!net.mask(i, a) || !net.mask(i, b)) continue;
    sa += net.values(i, a);
    sb += net.values(i, b);
    ++n;
  }
  if (n < 2) return std::nullopt;
  const double ma = sa / n;
  const double mb = sb / n;
  double saa = 0, sbb = 0, sab = 0;
  for (int i = i0; i <= i1; ++i) {
    if (!net.mask(i, a) || !net.mask(i, b)) continue;
    const double da = net.values(i, a) - ma;
    const double db = net.values(i, b) - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return std::nullopt;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

DedupResult dedup_columns(const ProxyNetwork& net, const YearAxis& overlap) {
  if (overlap.start_year < net.axis.start_year || overlap.end_year() > net.axis.end_year()) {
    throw DataError("dedup overlap extends outside the network axis");
  }
  std::vector<int> kept;
  std::vector<std::string> removed;
  for (int j = 0; j < net.n_proxies(); ++j) {
    bool duplicate = false;
    for (int k : kept) {
      const auto r = pairwise_correlation(net, k, j, overlap);
      if (r && std::abs(*r) >= 1.0 - 1e-12) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) {
      removed.push_back(net.ids[static_cast<std::size_t>(j)]);
    } else {
      kept.push_back(j);
    }
  }
  DedupResult out;
  out.removed = std::move(removed);
  out.network = net.without_columns(out.removed);
  return out;
}

ScaleParams column_scale(const ProxyNetwork& net, int column, const std::vector<int>& calib_years) {
  double sum = 0;
  int n = 0;
  for (int year : calib_years) {
    const int i = net.axis.index_of(year);
    if (!net.mask(i, column)) continue;
    sum += net.values(i, column);
    ++n;
  }
  const std::string& id = net.ids[static_cast<std::size_t>(column)];
  if (n < 2) {
    throw NumericError("proxy '" + id + "' has fewer than 2 available calibration years");
  }
  const double mean = sum / n;
  double ss = 0;
  for (int year : calib_years) {
    const int i = net.axis.index_of(year);
    if (!net.mask(i, column)) continue;
    const double d = net.values(i, column) - mean;
    ss += d * d;
  }
  if (ss <= 0.0) {
    throw NumericError("proxy '" + id + "' has zero variance over the calibration years");
  }
  return ScaleParams{mean, std::sqrt(ss / (n - 1))};
}

StandardizeResult standardize(const ProxyNetwork& net, const std::vector<int>& calib_years) {
  StandardizeResult out;
  out.network = net;
  out.params.columns.resize(static_cast<std::size_t>(net.n_proxies()));
  for (int j = 0; j < net.n_proxies(); ++j) {
    const ScaleParams p = column_scale(net, j, calib_years);
    out.params.columns[static_cast<std::size_t>(j)] = p;
    for (int i = 0; i < net.n_years(); ++i) {
      if (out.network.mask(i, j)) {
        out.network.values(i, j) = (net.values(i, j) - p.mean) / p.sd;
      }
    }
  }
  return out;
}

const char* to_string(WindowPosition position) {
  return position == WindowPosition::endpoint ? "endpoint" : "interior";
}

std::vector<SplitSpec> enumerate_splits(const YearAxis& axis, int holdout_length) {
  if (holdout_length < 1) throw ConfigError("holdout length must be positive");
  if (holdout_length >= axis.length) {
    throw ConfigError("holdout length " + std::to_string(holdout_length) +
                      " must be shorter than the axis length " + std::to_string(axis.length));
  }
  const int count = axis.length - holdout_length + 1;
  std::vector<SplitSpec> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    SplitSpec split;
    split.holdout_start = axis.start_year + i;
    split.holdout_length = holdout_length;
    const bool endpoint = (i == 0) || (i == count - 1);
    split.position = endpoint ? WindowPosition::endpoint : WindowPosition::interior;
    out.push_back(split);
  }
  return out;
}

std::vector<int> holdout_years(const SplitSpec& split) {
  std::vector<int> out(static_cast<std::size_t>(split.holdout_length));
  for (int i = 0; i < split.holdout_length; ++i) out[static_cast<std::size_t>(i)] = split.holdout_start + i;
  return out;
}

std::vector<int> calibration_years(const YearAxis& axis, const SplitSpec& split) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(axis.length - split.holdout_length));
  const int h0 = split.holdout_start;
  const int h1 = split.holdout_start + split.holdout_length - 1;
  for (int year = axis.start_year; year <= axis.end_year(); ++year) {
    if (year < h0 || year > h1) out.push_back(year);
  }
  return out;
}

}  // namespace proxybench
