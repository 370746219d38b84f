#include "proxybench/series.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "proxybench/errors.hpp"

namespace proxybench {

int YearAxis::index_of(int year) const {
  if (!contains(year)) {
    throw DataError("year " + std::to_string(year) + " outside axis [" +
                    std::to_string(start_year) + ", " + std::to_string(end_year()) + "]");
  }
  return year - start_year;
}

std::vector<int> YearAxis::years() const {
  std::vector<int> out(static_cast<std::size_t>(length));
  std::iota(out.begin(), out.end(), start_year);
  return out;
}

YearAxis YearAxis::from_range(int first_year, int last_year) {
  if (last_year < first_year) {
    throw DataError("year range [" + std::to_string(first_year) + ", " +
                    std::to_string(last_year) + "] is empty");
  }
  return YearAxis{first_year, last_year - first_year + 1};
}

std::optional<YearAxis> intersect(const YearAxis& a, const YearAxis& b) {
  const int first = std::max(a.start_year, b.start_year);
  const int last = std::min(a.end_year(), b.end_year());
  if (last < first) return std::nullopt;
  return YearAxis::from_range(first, last);
}

ProxySeries ProxyNetwork::column(int j) const {
  ProxySeries out;
  out.id = ids[static_cast<std::size_t>(j)];
  out.values.resize(static_cast<std::size_t>(n_years()));
  out.available.resize(static_cast<std::size_t>(n_years()));
  for (int i = 0; i < n_years(); ++i) {
    out.values[static_cast<std::size_t>(i)] = values(i, j);
    out.available[static_cast<std::size_t>(i)] = mask(i, j) ? 1 : 0;
  }
  return out;
}

int ProxyNetwork::column_index(const std::string& id) const {
  const auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) throw DataError("unknown proxy id '" + id + "'");
  return static_cast<int>(it - ids.begin());
}

bool ProxyNetwork::column_complete(int j, const std::vector<int>& years) const {
  for (int year : years) {
    if (!mask(axis.index_of(year), j)) return false;
  }
  return true;
}

ProxyNetwork ProxyNetwork::without_columns(const std::vector<std::string>& drop_ids) const {
  std::unordered_set<int> drop;
  for (const auto& id : drop_ids) drop.insert(column_index(id));

  ProxyNetwork out;
  out.axis = axis;
  const int kept = n_proxies() - static_cast<int>(drop.size());
  out.values.resize(n_years(), kept);
  out.mask.resize(n_years(), kept);
  int dst = 0;
  for (int j = 0; j < n_proxies(); ++j) {
    if (drop.count(j)) continue;
    out.ids.push_back(ids[static_cast<std::size_t>(j)]);
    out.values.col(dst) = values.col(j);
    out.mask.col(dst) = mask.col(j);
    ++dst;
  }
  return out;
}

void validate(const YearAxis& axis) {
  if (axis.length < 2) {
    throw DataError("year axis must span at least 2 years, got " + std::to_string(axis.length));
  }
}

void validate(const TargetSeries& series) {
  validate(series.axis);
  if (series.values.size() != static_cast<std::size_t>(series.axis.length)) {
    throw DataError("target series length does not match its axis");
  }
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    if (!std::isfinite(series.values[i])) {
      throw DataError("non-finite target value at year " +
                      std::to_string(series.axis.start_year + static_cast<int>(i)));
    }
  }
}

void validate(const ProxyNetwork& net) {
  validate(net.axis);
  if (net.values.rows() != net.axis.length || net.mask.rows() != net.axis.length ||
      net.values.cols() != static_cast<Eigen::Index>(net.ids.size()) ||
      net.mask.cols() != net.values.cols()) {
    throw DataError("proxy network shape does not match its axis and ids");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : net.ids) {
    if (id.empty()) throw DataError("proxy ids must be non-empty");
    if (!seen.insert(id).second) throw DataError("duplicate proxy id '" + id + "'");
  }
  for (int j = 0; j < net.n_proxies(); ++j) {
    bool any = false;
    for (int i = 0; i < net.n_years(); ++i) {
      if (!net.mask(i, j)) continue;
      any = true;
      if (!std::isfinite(net.values(i, j))) {
        throw DataError("non-finite value in proxy '" + net.ids[static_cast<std::size_t>(j)] +
                        "' at year " + std::to_string(net.axis.start_year + i));
      }
    }
    if (!any) {
      throw DataError("proxy '" + net.ids[static_cast<std::size_t>(j)] +
                      "' has no available observations");
    }
  }
}

}  // namespace proxybench
