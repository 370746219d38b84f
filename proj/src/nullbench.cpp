#include "proxybench/nullbench.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "proxybench/errors.hpp"
#include "proxybench/parallel.hpp"

namespace proxybench {

namespace {

// Keeps the error category while naming the Monte-Carlo trial that failed.
[[noreturn]] void rethrow_with_trial(int trial, const std::exception& e) {
  const std::string context = "trial " + std::to_string(trial) + ": " + e.what();
  if (dynamic_cast<const ConfigError*>(&e)) throw ConfigError(context);
  if (dynamic_cast<const DataError*>(&e)) throw DataError(context);
  throw NumericError(context);
}

}  // namespace

const char* to_string(Aggregation aggregation) {
  switch (aggregation) {
    case Aggregation::per_split: return "per_split";
    case Aggregation::mean_over_splits: return "mean_over_splits";
    case Aggregation::endpoint_only: return "endpoint_only";
  }
  throw ConfigError("unknown aggregation mode");
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw NumericError("percentile of an empty sample");
  if (!(p > 0.0) || p > 1.0) throw ConfigError("percentile level must be in (0, 1]");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  // ceil(p * n), 1-indexed; the guard keeps exactly-integer products from
  // rounding up when p itself is not representable.
  auto rank = static_cast<std::ptrdiff_t>(std::ceil(p * n - 1e-9));
  rank = std::clamp<std::ptrdiff_t>(rank, 1, static_cast<std::ptrdiff_t>(values.size()));
  return values[static_cast<std::size_t>(rank - 1)];
}

double aggregate_re(const std::vector<HoldoutResult>& results, Aggregation aggregation) {
  double sum = 0.0;
  int count = 0;
  for (const auto& r : results) {
    if (r.degenerate) continue;
    if (aggregation == Aggregation::endpoint_only &&
        r.split.position != WindowPosition::endpoint) {
      continue;
    }
    sum += r.re;
    ++count;
  }
  if (count == 0) throw NumericError("no non-degenerate holdout splits to aggregate");
  return sum / count;
}

NullEnsemble run_null_ensemble(const ProxyNetwork& net, const TargetSeries& target,
                               const MethodSpec& method, const NullModelSpec& null_spec,
                               int trials, int holdout_length, const RngSeed& seed,
                               Aggregation aggregation, int threads) {
  if (trials < 1) throw ConfigError("null ensemble needs at least one trial");

  NullEnsemble ensemble;
  ensemble.spec = null_spec;
  ensemble.trials = trials;
  ensemble.aggregation = aggregation;

  // Each trial writes into its own slot; concatenation order is by trial
  // index, never by completion order.
  std::vector<std::vector<double>> per_trial(static_cast<std::size_t>(trials));
  parallel_for(trials, threads, [&](int t) {
    try {
      const RngSeed trial_seed{seed.seed, seed.trial_index + static_cast<std::uint64_t>(t)};
      const ProxyNetwork pseudo = gen_pseudo_network(net, null_spec, trial_seed);
      const auto sweep = holdout_sweep(pseudo, target, method, holdout_length);
      auto& slot = per_trial[static_cast<std::size_t>(t)];
      if (aggregation == Aggregation::per_split) {
        for (const auto& r : sweep) {
          if (!r.degenerate) slot.push_back(r.re);
        }
      } else {
        slot.push_back(aggregate_re(sweep, aggregation));
      }
    } catch (const std::exception& e) {
      rethrow_with_trial(t, e);
    }
  });
  for (const auto& slot : per_trial) {
    ensemble.re_values.insert(ensemble.re_values.end(), slot.begin(), slot.end());
  }
  if (ensemble.re_values.empty()) {
    throw NumericError("null ensemble produced no usable RE values");
  }
  ensemble.p50 = percentile(ensemble.re_values, 0.50);
  ensemble.p95 = percentile(ensemble.re_values, 0.95);
  ensemble.p99 = percentile(ensemble.re_values, 0.99);
  return ensemble;
}

Verdict make_verdict(double re_proxy, const NullEnsemble& ensemble) {
  Verdict v;
  v.re_proxy = re_proxy;
  v.benchmark95 = ensemble.p95;
  v.benchmark99 = ensemble.p99;
  v.significant95 = re_proxy > ensemble.p95;
  v.significant99 = re_proxy > ensemble.p99;
  v.spec = ensemble.spec;
  return v;
}

FamilyComparison compare_null_families(const ProxyNetwork& net, const TargetSeries& target,
                                       const MethodSpec& method,
                                       const std::vector<NullModelSpec>& specs, int trials,
                                       int holdout_length, const RngSeed& seed,
                                       Aggregation aggregation, int threads) {
  if (specs.empty()) throw ConfigError("family comparison needs at least one null model");

  const auto real_sweep = holdout_sweep(net, target, method, holdout_length, threads);
  FamilyComparison comparison;
  comparison.aggregation = aggregation;
  comparison.re_proxy = aggregate_re(real_sweep, aggregation);
  comparison.families.reserve(specs.size());
  for (const auto& spec : specs) {
    FamilyReport report;
    report.ensemble = run_null_ensemble(net, target, method, spec, trials, holdout_length, seed,
                                        aggregation, threads);
    report.summary = summarize(report.ensemble.re_values);
    report.verdict = make_verdict(comparison.re_proxy, report.ensemble);
    comparison.families.push_back(std::move(report));
  }
  return comparison;
}

}  // namespace proxybench
