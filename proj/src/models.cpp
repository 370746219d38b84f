#include "proxybench/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "proxybench/errors.hpp"
#include "proxybench/lasso.hpp"

namespace proxybench {

namespace {

// Proxy columns available on every calibration year, in network order.
std::vector<int> complete_columns(const ProxyNetwork& net, const std::vector<int>& calib_years) {
  std::vector<int> cols;
  for (int j = 0; j < net.n_proxies(); ++j) {
    if (net.column_complete(j, calib_years)) cols.push_back(j);
  }
  return cols;
}

struct DesignMatrix {
  std::vector<int> predictors;
  std::vector<std::string> ids;
  Standardization scaling;
  Eigen::MatrixXd X;  // calib rows, standardized (mean 0 / sd 1 per column)
  Eigen::VectorXd y;
};

// Standardized calibration design for the listwise-complete columns. Throws
// DataError when no column survives, NumericError via column_scale when the
// calibration period is too short or a column is constant on it.
DesignMatrix build_design(const ProxyNetwork& net, const TargetSeries& target,
                          const std::vector<int>& calib_years) {
  if (calib_years.empty()) throw ConfigError("calibration period is empty");
  DesignMatrix d;
  d.predictors = complete_columns(net, calib_years);
  if (d.predictors.empty()) {
    throw DataError("no proxy column is complete over the calibration period");
  }
  const int n = static_cast<int>(calib_years.size());
  const int p = static_cast<int>(d.predictors.size());
  d.X.resize(n, p);
  d.y.resize(n);
  d.scaling.columns.reserve(static_cast<std::size_t>(p));
  d.ids.reserve(static_cast<std::size_t>(p));
  for (int jj = 0; jj < p; ++jj) {
    const int col = d.predictors[static_cast<std::size_t>(jj)];
    d.scaling.columns.push_back(column_scale(net, col, calib_years));
    d.ids.push_back(net.ids[static_cast<std::size_t>(col)]);
  }
  for (int r = 0; r < n; ++r) {
    const int t = net.axis.index_of(calib_years[static_cast<std::size_t>(r)]);
    d.y(r) = target.at_year(calib_years[static_cast<std::size_t>(r)]);
    for (int jj = 0; jj < p; ++jj) {
      const int col = d.predictors[static_cast<std::size_t>(jj)];
      d.X(r, jj) = d.scaling.to_standard(jj, net.values(t, col));
    }
  }
  return d;
}

// Near-equal contiguous blocks over n row indices: [start, end) per block.
std::vector<std::pair<int, int>> block_bounds(int n, int n_blocks) {
  const int blocks = std::min(n_blocks, n);
  std::vector<std::pair<int, int>> bounds;
  bounds.reserve(static_cast<std::size_t>(blocks));
  for (int b = 0; b < blocks; ++b) {
    bounds.emplace_back(b * n / blocks, (b + 1) * n / blocks);
  }
  return bounds;
}

}  // namespace

std::string method_tag(const MethodSpec& spec) {
  switch (spec.method) {
    case Method::intercept: return "intercept";
    case Method::lasso: return "lasso";
    case Method::pcr: return "pcr_k" + std::to_string(spec.pcs);
  }
  throw ConfigError("unknown reconstruction method");
}

Eigen::VectorXd ReconstructionModel::raw_coefficients() const {
  Eigen::VectorXd raw(coefficients.size());
  for (Eigen::Index j = 0; j < coefficients.size(); ++j) {
    raw(j) = coefficients(j) / scaling.columns[static_cast<std::size_t>(j)].sd;
  }
  return raw;
}

double ReconstructionModel::raw_intercept() const {
  double b0 = intercept;
  for (Eigen::Index j = 0; j < coefficients.size(); ++j) {
    const auto& p = scaling.columns[static_cast<std::size_t>(j)];
    b0 -= coefficients(j) * p.mean / p.sd;
  }
  return b0;
}

ReconstructionModel fit_intercept(const TargetSeries& target,
                                  const std::vector<int>& calib_years) {
  if (calib_years.empty()) throw ConfigError("calibration period is empty");
  double mean = 0.0;
  for (int year : calib_years) mean += target.at_year(year);
  mean /= static_cast<double>(calib_years.size());

  ReconstructionModel model;
  model.spec.method = Method::intercept;
  model.intercept = mean;
  model.coefficients = Eigen::VectorXd(0);
  return model;
}

ReconstructionModel fit_lasso(const ProxyNetwork& net, const TargetSeries& target,
                              const std::vector<int>& calib_years,
                              std::optional<double> lambda) {
  const double resolved =
      lambda ? *lambda : select_lambda_by_cv(net, target, calib_years);
  DesignMatrix d = build_design(net, target, calib_years);
  const LassoFit fit = lasso_solve(d.X, d.y, resolved);

  ReconstructionModel model;
  model.spec.method = Method::lasso;
  model.spec.lambda = resolved;
  model.predictors = std::move(d.predictors);
  model.predictor_ids = std::move(d.ids);
  model.scaling = std::move(d.scaling);
  model.intercept = fit.intercept;
  model.coefficients = fit.coefficients;
  return model;
}

ReconstructionModel fit_pcr(const ProxyNetwork& net, const TargetSeries& target,
                            const std::vector<int>& calib_years, int k) {
  if (k < 1) throw ConfigError("pcr needs at least one component");
  DesignMatrix d = build_design(net, target, calib_years);

  Eigen::BDCSVD<Eigen::MatrixXd> svd(d.X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double tol = sigma.size() > 0
                         ? sigma(0) * std::numeric_limits<double>::epsilon() *
                               static_cast<double>(std::max(d.X.rows(), d.X.cols()))
                         : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > tol) ++rank;
  }
  if (k > rank) {
    throw ConfigError("pcr: requested " + std::to_string(k) +
                      " components but the calibration matrix has rank " + std::to_string(rank));
  }

  const double y_mean = d.y.mean();
  const Eigen::VectorXd y_c = d.y.array() - y_mean;
  Eigen::MatrixXd loadings = svd.matrixV().leftCols(k);
  Eigen::VectorXd gamma(k);
  for (int i = 0; i < k; ++i) {
    gamma(i) = svd.matrixU().col(i).dot(y_c) / sigma(i);
    // Deterministic orientation: the largest-magnitude loading entry is
    // positive (lowest index on ties). U and gamma flip together with V.
    Eigen::Index at = 0;
    loadings.col(i).cwiseAbs().maxCoeff(&at);
    if (loadings(at, i) < 0.0) {
      loadings.col(i) = -loadings.col(i);
      gamma(i) = -gamma(i);
    }
  }

  ReconstructionModel model;
  model.spec.method = Method::pcr;
  model.spec.pcs = k;
  model.predictors = std::move(d.predictors);
  model.predictor_ids = std::move(d.ids);
  model.scaling = std::move(d.scaling);
  model.intercept = y_mean;
  model.coefficients = loadings * gamma;
  model.pc_loadings = std::move(loadings);
  model.pc_coefficients = std::move(gamma);
  model.rank = rank;
  return model;
}

ReconstructionModel fit_model(const MethodSpec& spec, const ProxyNetwork& net,
                              const TargetSeries& target, const std::vector<int>& calib_years) {
  switch (spec.method) {
    case Method::intercept: return fit_intercept(target, calib_years);
    case Method::lasso: return fit_lasso(net, target, calib_years, spec.lambda);
    case Method::pcr: return fit_pcr(net, target, calib_years, spec.pcs);
  }
  throw ConfigError("unknown reconstruction method");
}

Backcast predict(const ReconstructionModel& model, const ProxyNetwork& net,
                 const std::vector<int>& years) {
  // Resolve predictors by id so the model also applies to a network whose
  // column order differs from the fitting network's.
  std::vector<int> cols;
  cols.reserve(model.predictor_ids.size());
  for (const auto& id : model.predictor_ids) cols.push_back(net.column_index(id));

  Backcast out;
  out.years = years;
  out.values.reserve(years.size());
  out.method = method_tag(model.spec);
  for (int year : years) {
    const int t = net.axis.index_of(year);
    double value = model.intercept;
    for (std::size_t jj = 0; jj < cols.size(); ++jj) {
      const int col = cols[jj];
      if (!net.mask(t, col)) {
        throw DataError("proxy '" + model.predictor_ids[jj] + "' is unavailable in year " +
                        std::to_string(year));
      }
      value += model.coefficients(static_cast<Eigen::Index>(jj)) *
               model.scaling.to_standard(static_cast<int>(jj), net.values(t, col));
    }
    out.values.push_back(value);
  }
  return out;
}

WeightProfile pc_weight_profile(const ReconstructionModel& model) {
  if (model.spec.method != Method::pcr) {
    throw ConfigError("pc_weight_profile requires a pcr model");
  }
  WeightProfile profile;
  profile.ids = model.predictor_ids;
  profile.weight.resize(profile.ids.size());
  profile.l1_share.resize(profile.ids.size());
  double total = 0.0;
  for (std::size_t j = 0; j < profile.ids.size(); ++j) {
    const double w =
        model.coefficients(static_cast<Eigen::Index>(j)) / model.scaling.columns[j].sd;
    profile.weight[j] = w;
    total += std::abs(w);
  }
  for (std::size_t j = 0; j < profile.ids.size(); ++j) {
    profile.l1_share[j] = total > 0.0 ? std::abs(profile.weight[j]) / total : 0.0;
  }
  return profile;
}

double select_lambda_by_cv(const ProxyNetwork& net, const TargetSeries& target,
                           const std::vector<int>& calib_years, int n_blocks, int n_lambdas) {
  if (n_blocks < 2) throw ConfigError("lambda CV needs at least 2 blocks");
  if (n_lambdas < 1) throw ConfigError("lambda CV needs a non-empty grid");
  const DesignMatrix d = build_design(net, target, calib_years);
  const int n = static_cast<int>(d.X.rows());
  const int p = static_cast<int>(d.X.cols());
  if (n < 2) throw ConfigError("lambda CV needs at least 2 calibration years");

  // Smallest lambda with an all-zero solution on the full calibration fit;
  // the grid descends from there over three decades.
  const Eigen::VectorXd y_c = d.y.array() - d.y.mean();
  const double lambda_max = (d.X.transpose() * y_c).cwiseAbs().maxCoeff() / n;
  if (lambda_max <= 0.0) return 0.0;
  std::vector<double> grid(static_cast<std::size_t>(n_lambdas));
  for (int i = 0; i < n_lambdas; ++i) {
    const double frac = n_lambdas > 1 ? static_cast<double>(i) / (n_lambdas - 1) : 0.0;
    grid[static_cast<std::size_t>(i)] = lambda_max * std::pow(1e-3, frac);
  }

  const auto blocks = block_bounds(n, n_blocks);
  std::vector<double> sse(grid.size(), 0.0);
  for (const auto& [lo, hi] : blocks) {
    const int n_test = hi - lo;
    const int n_train = n - n_test;
    if (n_train < 2) continue;

    Eigen::MatrixXd X_train(n_train, p);
    Eigen::VectorXd y_train(n_train);
    int r = 0;
    for (int i = 0; i < n; ++i) {
      if (i >= lo && i < hi) continue;
      X_train.row(r) = d.X.row(i);
      y_train(r) = d.y(i);
      ++r;
    }
    // Re-center per fold so the unpenalized intercept stays exact.
    const Eigen::RowVectorXd col_means = X_train.colwise().mean();
    X_train.rowwise() -= col_means;
    const double y_mean = y_train.mean();
    const Eigen::VectorXd y_centered = y_train.array() - y_mean;

    const Eigen::MatrixXd gram = X_train.transpose() * X_train;
    const Eigen::VectorXd xty = X_train.transpose() * y_centered;
    const double y_sq = y_centered.squaredNorm();

    Eigen::VectorXd warm = Eigen::VectorXd::Zero(p);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const LassoFit fit =
          lasso_solve_gram(gram, xty, y_mean, y_sq, n_train, grid[g], {}, &warm);
      warm = fit.coefficients;
      for (int i = lo; i < hi; ++i) {
        const double pred = fit.intercept + (d.X.row(i) - col_means).dot(fit.coefficients);
        const double err = pred - d.y(i);
        sse[g] += err * err;
      }
    }
  }

  // Strict improvement keeps the largest lambda on ties (grid is descending).
  std::size_t best = 0;
  for (std::size_t g = 1; g < sse.size(); ++g) {
    if (sse[g] < sse[best]) best = g;
  }
  return grid[best];
}

double block_cv_rmse(const MethodSpec& spec, const ProxyNetwork& net, const TargetSeries& target,
                     const std::vector<int>& calib_years, int n_blocks) {
  if (n_blocks < 2) throw ConfigError("block CV needs at least 2 blocks");
  const int n = static_cast<int>(calib_years.size());
  if (n < n_blocks) throw ConfigError("block CV needs at least one year per block");

  double sse = 0.0;
  int count = 0;
  for (const auto& [lo, hi] : block_bounds(n, n_blocks)) {
    std::vector<int> train_years;
    std::vector<int> test_years;
    train_years.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      if (i >= lo && i < hi) {
        test_years.push_back(calib_years[static_cast<std::size_t>(i)]);
      } else {
        train_years.push_back(calib_years[static_cast<std::size_t>(i)]);
      }
    }
    const ReconstructionModel model = fit_model(spec, net, target, train_years);
    const Backcast cast = predict(model, net, test_years);
    for (std::size_t i = 0; i < test_years.size(); ++i) {
      const double err = cast.values[i] - target.at_year(test_years[i]);
      sse += err * err;
      ++count;
    }
  }
  if (count == 0) throw NumericError("block CV produced no test predictions");
  return std::sqrt(sse / static_cast<double>(count));
}

}  // namespace proxybench
