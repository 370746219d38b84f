#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "proxybench/series.hpp"

namespace testutil {

inline proxybench::YearAxis make_axis(int start, int length) {
  return proxybench::YearAxis{start, length};
}

inline proxybench::TargetSeries make_target(int start, std::vector<double> values) {
  proxybench::TargetSeries t;
  t.axis = {start, static_cast<int>(values.size())};
  t.values = std::move(values);
  return t;
}

// Network from full columns; pass masks only for columns with gaps.
inline proxybench::ProxyNetwork make_network(
    int start, const std::vector<std::string>& ids,
    const std::vector<std::vector<double>>& columns,
    const std::vector<std::vector<bool>>& masks = {}) {
  proxybench::ProxyNetwork net;
  const int n = static_cast<int>(columns.front().size());
  const int p = static_cast<int>(columns.size());
  net.axis = {start, n};
  net.ids = ids;
  net.values.resize(n, p);
  net.mask.resize(n, p);
  for (int j = 0; j < p; ++j) {
    for (int t = 0; t < n; ++t) {
      const bool ok = masks.empty() || masks[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)];
      net.mask(t, j) = ok;
      net.values(t, j) = ok ? columns[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)] : 0.0;
    }
  }
  return net;
}

// Deterministic fixture generator, independent of the library's stream
// derivation so fixtures would survive a library RNG change.
class FixtureRng {
 public:
  explicit FixtureRng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

  std::vector<double> normals(int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = normal();
    return v;
  }

  // AR(1) path with stationary start, for fixtures with serial correlation.
  std::vector<double> ar1(int n, double phi, double sigma = 1.0) {
    std::vector<double> v(static_cast<std::size_t>(n));
    v[0] = normal() * sigma / std::sqrt(1.0 - phi * phi);
    for (int t = 1; t < n; ++t) v[static_cast<std::size_t>(t)] = phi * v[static_cast<std::size_t>(t - 1)] + sigma * normal();
    return v;
  }

 private:
  std::mt19937_64 engine_;
};

// Ordinary least squares with intercept via QR; the normal-equations oracle
// for the lasso (lambda = 0) and full-rank PCR comparisons.
struct OlsFit {
  double intercept = 0.0;
  Eigen::VectorXd coefficients;
};

inline OlsFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd design(n, X.cols() + 1);
  design.col(0) = Eigen::VectorXd::Ones(n);
  design.rightCols(X.cols()) = X;
  const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(y);
  OlsFit fit;
  fit.intercept = beta(0);
  fit.coefficients = beta.tail(X.cols());
  return fit;
}

// Two-sample Kolmogorov-Smirnov statistic (max CDF gap).
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    const double fa = static_cast<double>(i) / static_cast<double>(a.size());
    const double fb = static_cast<double>(j) / static_cast<double>(b.size());
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

// Rejection threshold at alpha = 0.01: c(alpha) * sqrt((n+m)/(n*m)).
inline double ks_critical_1pct(std::size_t n, std::size_t m) {
  return 1.628 * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
}

// Scratch directory for file-based tests; recreated empty per call.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("proxybench_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace testutil
