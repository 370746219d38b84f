#pragma once

#include <vector>

#include "proxybench/noise.hpp"
#include "proxybench/skill.hpp"

namespace proxybench {

enum class Aggregation { per_split, mean_over_splits, endpoint_only };

const char* to_string(Aggregation aggregation);

// Monte-Carlo null distribution of RE statistics from pseudoproxy trials.
struct NullEnsemble {
  NullModelSpec spec;
  int trials = 0;
  Aggregation aggregation = Aggregation::mean_over_splits;
  std::vector<double> re_values;  // per trial (aggregated) or per (trial, split)
  double p50 = 0.0, p95 = 0.0, p99 = 0.0;
};

// Conservative upper empirical quantile: order statistic at ceil(p * n),
// 1-indexed on the sorted sample. No interpolation.
double percentile(std::vector<double> values, double p);

// Mean RE over the splits selected by the aggregation rule; degenerate splits
// are skipped. per_split uses all splits (so it coincides with
// mean_over_splits for a single sweep).
double aggregate_re(const std::vector<HoldoutResult>& results, Aggregation aggregation);

// One pseudoproxy network per trial (substreams derived from seed.trial_index
// + t), swept with the same method as the real proxies. Trials may run
// concurrently; re_values are ordered by trial, so results are
// schedule-independent.
NullEnsemble run_null_ensemble(const ProxyNetwork& net, const TargetSeries& target,
                               const MethodSpec& method, const NullModelSpec& null_spec,
                               int trials, int holdout_length, const RngSeed& seed,
                               Aggregation aggregation = Aggregation::mean_over_splits,
                               int threads = 1);

struct Verdict {
  double re_proxy = 0.0;
  double benchmark95 = 0.0;
  double benchmark99 = 0.0;
  bool significant95 = false;  // strict exceedance of the 95th percentile
  bool significant99 = false;
  NullModelSpec spec;
};

Verdict make_verdict(double re_proxy, const NullEnsemble& ensemble);

struct FamilyReport {
  NullEnsemble ensemble;
  DistributionSummary summary;
  Verdict verdict;
};

struct FamilyComparison {
  double re_proxy = 0.0;
  Aggregation aggregation = Aggregation::mean_over_splits;
  std::vector<FamilyReport> families;
};

// Side-by-side null ensembles for several families against the same real
// sweep; every family reuses the same trial indices (identical specs with
// identical seeds produce identical reports).
FamilyComparison compare_null_families(const ProxyNetwork& net, const TargetSeries& target,
                                       const MethodSpec& method,
                                       const std::vector<NullModelSpec>& specs, int trials,
                                       int holdout_length, const RngSeed& seed,
                                       Aggregation aggregation = Aggregation::mean_over_splits,
                                       int threads = 1);

}  // namespace proxybench
