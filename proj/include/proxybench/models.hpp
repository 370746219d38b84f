#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "proxybench/preprocess.hpp"
#include "proxybench/series.hpp"

namespace proxybench {

enum class Method { intercept, lasso, pcr };

struct MethodSpec {
  Method method = Method::intercept;
  std::optional<double> lambda;  // lasso; empty selects lambda by block CV
  int pcs = 1;                   // pcr component count
};

// Short tag used in reports: "intercept", "lasso", "pcr_k5", ...
std::string method_tag(const MethodSpec& spec);

// A fitted estimator mapping proxy rows to target values. Coefficients are on
// the standardized predictor scale; `scaling` holds the calibration-period
// standardization so predictions apply to raw proxy values.
struct ReconstructionModel {
  MethodSpec spec;  // lasso lambda resolved after CV
  std::vector<int> predictors;  // network column indices used (listwise-complete on calib)
  std::vector<std::string> predictor_ids;
  Standardization scaling;
  double intercept = 0.0;
  Eigen::VectorXd coefficients;

  // pcr only
  Eigen::MatrixXd pc_loadings;     // predictors x k, orthonormal columns
  Eigen::VectorXd pc_coefficients; // k
  int rank = 0;                    // numeric rank of the calibration matrix

  // Equivalent coefficients on raw proxy units.
  Eigen::VectorXd raw_coefficients() const;
  double raw_intercept() const;
};

// Predicts the calibration-period mean of the target everywhere.
ReconstructionModel fit_intercept(const TargetSeries& target, const std::vector<int>& calib_years);

// Lasso on calibration-standardized predictors and centered target. Proxies
// with any missing calibration year are excluded listwise. When lambda is
// empty it is selected by leave-one-block-out CV (10 contiguous blocks).
ReconstructionModel fit_lasso(const ProxyNetwork& net, const TargetSeries& target,
                              const std::vector<int>& calib_years, std::optional<double> lambda);

// Principal-components regression: SVD of the standardized calibration
// matrix, least squares of the target on the first k component scores.
ReconstructionModel fit_pcr(const ProxyNetwork& net, const TargetSeries& target,
                            const std::vector<int>& calib_years, int k);

ReconstructionModel fit_model(const MethodSpec& spec, const ProxyNetwork& net,
                              const TargetSeries& target, const std::vector<int>& calib_years);

struct Backcast {
  std::vector<int> years;
  std::vector<double> values;  // degrees C anomaly
  std::string method;
};

// Applies stored preprocessing and the linear map; every predictor must be
// available on each requested year (the offending year is named otherwise).
Backcast predict(const ReconstructionModel& model, const ProxyNetwork& net,
                 const std::vector<int>& years);

struct WeightProfile {
  std::vector<std::string> ids;
  std::vector<double> weight;    // effective raw-scale weight per proxy
  std::vector<double> l1_share;  // |weight| / sum|weight|
};

// Effective per-proxy weights of a PCR model: loadings times component
// coefficients, mapped back through standardization. Throws for non-pcr.
WeightProfile pc_weight_profile(const ReconstructionModel& model);

// Lambda grid (log-spaced down from the all-zero threshold) scored by
// leave-one-block-out CV over the calibration years; ties prefer the larger
// lambda. Returns the winning lambda.
double select_lambda_by_cv(const ProxyNetwork& net, const TargetSeries& target,
                           const std::vector<int>& calib_years, int n_blocks = 10,
                           int n_lambdas = 30);

// Block-CV RMSE of a method over the calibration years (used by the
// reconstruction divergence table).
double block_cv_rmse(const MethodSpec& spec, const ProxyNetwork& net, const TargetSeries& target,
                     const std::vector<int>& calib_years, int n_blocks = 10);

}  // namespace proxybench
