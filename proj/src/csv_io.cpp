#include "proxybench/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "proxybench/errors.hpp"
#include "proxybench/report.hpp"

namespace proxybench {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  out.push_back(field);
  return out;
}

int parse_year(const std::string& field, const std::filesystem::path& path, int line_no) {
  int year = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), year);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed year '" + field +
                    "'");
  }
  return year;
}

double parse_value(const std::string& field, const std::filesystem::path& path, int line_no) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed value '" + field +
                    "'");
  }
  if (!std::isfinite(value)) {
    throw DataError(path.string() + ":" + std::to_string(line_no) + ": non-finite value '" + field +
                    "'");
  }
  return value;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  if (lines.empty()) throw DataError(path.string() + ": empty file");
  return lines;
}

void check_years_consecutive(const std::vector<int>& sorted_years,
                             const std::filesystem::path& path) {
  for (std::size_t i = 1; i < sorted_years.size(); ++i) {
    if (sorted_years[i] == sorted_years[i - 1]) {
      throw DataError(path.string() + ": duplicate year " + std::to_string(sorted_years[i]));
    }
    if (sorted_years[i] != sorted_years[i - 1] + 1) {
      throw DataError(path.string() + ": gap between years " + std::to_string(sorted_years[i - 1]) +
                      " and " + std::to_string(sorted_years[i]));
    }
  }
}

}  // namespace

TargetSeries load_target(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (split_fields(lines[0]) != std::vector<std::string>{"year", "value"}) {
    throw DataError(path.string() + ": expected header 'year,value'");
  }

  std::vector<std::pair<int, double>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = split_fields(lines[i]);
    const int line_no = static_cast<int>(i) + 1;
    if (fields.size() != 2) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected 2 fields, got " +
                      std::to_string(fields.size()));
    }
    rows.emplace_back(parse_year(fields[0], path, line_no), parse_value(fields[1], path, line_no));
  }
  if (rows.size() < 2) throw DataError(path.string() + ": target needs at least 2 rows");

  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<int> years;
  years.reserve(rows.size());
  for (const auto& [year, value] : rows) years.push_back(year);
  check_years_consecutive(years, path);

  TargetSeries series;
  series.axis = YearAxis{years.front(), static_cast<int>(years.size())};
  series.values.reserve(rows.size());
  for (const auto& [year, value] : rows) series.values.push_back(value);
  validate(series);
  return series;
}

void write_target(const std::filesystem::path& path, const TargetSeries& series) {
  std::ostringstream out;
  out << "year,value\n";
  for (int i = 0; i < series.axis.length; ++i) {
    out << series.axis.start_year + i << ','
        << format_double(series.values[static_cast<std::size_t>(i)]) << '\n';
  }
  write_text_file(path, out.str());
}

ProxyNetwork load_network(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  const auto header = split_fields(lines[0]);
  if (header.size() < 2 || header[0] != "year") {
    throw DataError(path.string() + ": expected header 'year,<id1>,<id2>,...'");
  }
  const int n_proxies = static_cast<int>(header.size()) - 1;

  struct Row {
    int year;
    int line_no;
    std::vector<std::string> cells;
  };
  std::vector<Row> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto fields = split_fields(lines[i]);
    const int line_no = static_cast<int>(i) + 1;
    if (fields.size() != header.size()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    Row row;
    row.year = parse_year(fields[0], path, line_no);
    row.line_no = line_no;
    row.cells.assign(fields.begin() + 1, fields.end());
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw DataError(path.string() + ": network needs at least 2 rows");

  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.year < b.year; });
  std::vector<int> years;
  years.reserve(rows.size());
  for (const auto& row : rows) years.push_back(row.year);
  check_years_consecutive(years, path);

  ProxyNetwork net;
  net.axis = YearAxis{years.front(), static_cast<int>(years.size())};
  net.ids.assign(header.begin() + 1, header.end());
  net.values = Eigen::MatrixXd::Zero(net.axis.length, n_proxies);
  net.mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(net.axis.length,
                                                                          n_proxies, false);
  for (int i = 0; i < net.axis.length; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    for (int j = 0; j < n_proxies; ++j) {
      const auto& cell = row.cells[static_cast<std::size_t>(j)];
      if (cell.empty()) continue;
      net.values(i, j) = parse_value(cell, path, row.line_no);
      net.mask(i, j) = true;
    }
  }
  validate(net);
  return net;
}

void write_network(const std::filesystem::path& path, const ProxyNetwork& net) {
  std::ostringstream out;
  out << "year";
  for (const auto& id : net.ids) out << ',' << id;
  out << '\n';
  for (int i = 0; i < net.n_years(); ++i) {
    out << net.axis.start_year + i;
    for (int j = 0; j < net.n_proxies(); ++j) {
      out << ',';
      if (net.mask(i, j)) out << format_double(net.values(i, j));
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

}  // namespace proxybench
