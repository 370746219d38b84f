#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace proxybench {

// Consecutive calendar years starting at start_year.
struct YearAxis {
  int start_year = 0;
  int length = 0;

  int end_year() const { return start_year + length - 1; }
  bool contains(int year) const { return year >= start_year && year <= end_year(); }
  int index_of(int year) const;  // throws DataError when year is outside the axis
  std::vector<int> years() const;

  static YearAxis from_range(int first_year, int last_year);
};

// Intersection of two axes; empty when they do not overlap.
std::optional<YearAxis> intersect(const YearAxis& a, const YearAxis& b);

// Instrumental temperature anomaly series, one finite value per axis year.
struct TargetSeries {
  YearAxis axis;
  std::vector<double> values;

  double at_year(int year) const { return values[static_cast<std::size_t>(axis.index_of(year))]; }
};

struct ProxySeries {
  std::string id;
  std::vector<double> values;
  std::vector<std::uint8_t> available;
};

// Year-by-proxy value matrix with a per-cell availability mask. Cells where
// the mask is false carry no information and are held at zero.
struct ProxyNetwork {
  YearAxis axis;
  std::vector<std::string> ids;
  Eigen::MatrixXd values;  // axis.length rows, one column per proxy
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask;

  int n_years() const { return static_cast<int>(values.rows()); }
  int n_proxies() const { return static_cast<int>(values.cols()); }

  ProxySeries column(int j) const;
  int column_index(const std::string& id) const;  // throws DataError when unknown
  bool column_complete(int j, const std::vector<int>& years) const;

  // Copy with the named columns dropped; unknown ids raise DataError.
  ProxyNetwork without_columns(const std::vector<std::string>& drop_ids) const;
};

void validate(const YearAxis& axis);
void validate(const TargetSeries& series);
void validate(const ProxyNetwork& net);

}  // namespace proxybench
