#pragma once

#include <Eigen/Dense>
#include <vector>

namespace proxybench {

struct LassoOptions {
  double tolerance = 1e-9;  // sweep converges when max coefficient change is below this
  int max_sweeps = 10000;
  bool record_objective = false;  // fill objective_trace, one entry per sweep
};

struct LassoFit {
  Eigen::VectorXd coefficients;
  double intercept = 0.0;  // mean of y; exact when predictor columns are centered
  int sweeps = 0;
  std::vector<double> objective_trace;
};

inline double soft_threshold(double value, double threshold) {
  if (value > threshold) return value - threshold;
  if (value < -threshold) return value + threshold;
  return 0.0;
}

// Minimizes (1/(2n)) * sum((y - b0 - X b)^2) + lambda * sum(|b|) by cyclic
// coordinate descent with soft thresholding; b0 is unpenalized and equals
// mean(y) (callers pass centered predictor columns). The Gram matrix is
// precomputed, so each coordinate update costs O(p). Throws NumericError with
// the sweep count when the tolerance is not reached within max_sweeps.
LassoFit lasso_solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                     const LassoOptions& options = {});

// Gram-space entry point used by the holdout sweep fast path and by
// lasso_solve itself: gram = X^T X, xty = X^T (y - mean(y)), n = sample
// count. When warm_start has the right size it seeds the coefficients.
LassoFit lasso_solve_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty, double y_mean,
                          double y_centered_sq_norm, int n, double lambda,
                          const LassoOptions& options = {},
                          const Eigen::VectorXd* warm_start = nullptr);

// Largest KKT violation of the fit: for zero coefficients the subgradient
// magnitude above lambda, for active ones the distance from equality.
double lasso_kkt_violation(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           const LassoFit& fit, double lambda);

}  // namespace proxybench
