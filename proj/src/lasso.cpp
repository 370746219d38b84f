#include "proxybench/lasso.hpp"

#include <cmath>
#include <string>

#include "proxybench/errors.hpp"

namespace proxybench {

LassoFit lasso_solve_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty, double y_mean,
                          double y_centered_sq_norm, int n, double lambda,
                          const LassoOptions& options, const Eigen::VectorXd* warm_start) {
  if (lambda < 0.0) throw ConfigError("lasso: lambda must be non-negative");
  if (n < 1) throw ConfigError("lasso: sample count must be positive");
  const Eigen::Index p = gram.rows();
  if (gram.cols() != p || xty.size() != p) {
    throw ConfigError("lasso: gram and xty dimensions disagree");
  }

  LassoFit fit;
  fit.intercept = y_mean;
  fit.coefficients = Eigen::VectorXd::Zero(p);
  if (warm_start && warm_start->size() == p) fit.coefficients = *warm_start;
  if (p == 0) return fit;

  const double dn = static_cast<double>(n);
  // gb = gram * coefficients, maintained incrementally so each coordinate
  // update is O(p) instead of O(n p).
  Eigen::VectorXd gb = gram * fit.coefficients;

  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double gjj = gram(j, j);
      if (gjj <= 0.0) continue;  // constant column; its coefficient stays put
      const double old = fit.coefficients(j);
      const double rho = (xty(j) - gb(j) + gjj * old) / dn;
      const double updated = soft_threshold(rho, lambda) * dn / gjj;
      const double change = updated - old;
      if (change != 0.0) {
        fit.coefficients(j) = updated;
        gb += gram.col(j) * change;
        max_change = std::max(max_change, std::abs(change));
      }
    }
    fit.sweeps = sweep;
    if (options.record_objective) {
      const double quad =
          y_centered_sq_norm - 2.0 * fit.coefficients.dot(xty) + fit.coefficients.dot(gb);
      fit.objective_trace.push_back(quad / (2.0 * dn) +
                                    lambda * fit.coefficients.lpNorm<1>());
    }
    if (max_change < options.tolerance) return fit;
  }
  throw NumericError("lasso failed to converge after " + std::to_string(options.max_sweeps) +
                     " sweeps (tolerance " + std::to_string(options.tolerance) + ")");
}

LassoFit lasso_solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                     const LassoOptions& options) {
  if (X.rows() != y.size()) throw ConfigError("lasso: X rows and y length disagree");
  if (X.rows() < 1) throw ConfigError("lasso: sample count must be positive");
  const double y_mean = y.mean();
  const Eigen::VectorXd y_c = y.array() - y_mean;
  const Eigen::MatrixXd gram = X.transpose() * X;
  const Eigen::VectorXd xty = X.transpose() * y_c;
  return lasso_solve_gram(gram, xty, y_mean, y_c.squaredNorm(), static_cast<int>(X.rows()),
                          lambda, options);
}

double lasso_kkt_violation(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           const LassoFit& fit, double lambda) {
  const double dn = static_cast<double>(X.rows());
  const Eigen::VectorXd residual =
      y - Eigen::VectorXd::Constant(y.size(), fit.intercept) - X * fit.coefficients;
  const Eigen::VectorXd corr = X.transpose() * residual / dn;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < fit.coefficients.size(); ++j) {
    double violation = 0.0;
    if (fit.coefficients(j) > 0.0) {
      violation = std::abs(corr(j) - lambda);
    } else if (fit.coefficients(j) < 0.0) {
      violation = std::abs(corr(j) + lambda);
    } else {
      violation = std::max(0.0, std::abs(corr(j)) - lambda);
    }
    worst = std::max(worst, violation);
  }
  return worst;
}

}  // namespace proxybench
