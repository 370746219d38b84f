#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <optional>
#include <vector>

#include "helpers.hpp"
#include "proxybench/errors.hpp"
#include "proxybench/nullbench.hpp"

using namespace proxybench;

namespace {

struct Fixture {
  ProxyNetwork net;
  TargetSeries target;
};

Fixture small_fixture(std::uint64_t seed, int years = 60, int p = 3) {
  testutil::FixtureRng rng(seed);
  Fixture f;
  f.target = testutil::make_target(1900, rng.ar1(years, 0.3));
  std::vector<std::string> ids;
  std::vector<std::vector<double>> cols;
  for (int j = 0; j < p; ++j) {
    ids.push_back("p" + std::to_string(j));
    cols.push_back(rng.normals(years));
  }
  f.net = testutil::make_network(1900, ids, cols);
  return f;
}

}  // namespace

TEST_CASE("percentile picks the conservative order statistic") {
  std::vector<double> ranks(100);
  std::iota(ranks.begin(), ranks.end(), 1.0);
  CHECK(percentile(ranks, 0.95) == 95.0);
  CHECK(percentile(ranks, 0.99) == 99.0);
  CHECK(percentile(ranks, 0.50) == 50.0);
  CHECK(percentile(ranks, 1.0) == 100.0);
  CHECK(percentile(ranks, 0.001) == 1.0);

  std::vector<double> odd(999);
  std::iota(odd.begin(), odd.end(), 1.0);
  // ceil(0.95 * 999) = ceil(949.05) = 950.
  CHECK(percentile(odd, 0.95) == 950.0);
  CHECK(percentile(odd, 0.99) == 990.0);

  CHECK(percentile({42.0}, 0.5) == 42.0);
  CHECK(percentile({42.0}, 0.99) == 42.0);

  // Order of the input must not matter.
  CHECK(percentile({3.0, 1.0, 2.0}, 0.5) == 2.0);

  CHECK_THROWS_AS(percentile({}, 0.5), NumericError);
  CHECK_THROWS_AS(percentile({1.0}, 0.0), ConfigError);
  CHECK_THROWS_AS(percentile({1.0}, 1.5), ConfigError);
}

TEST_CASE("percentiles are monotone in the level") {
  testutil::FixtureRng rng(5);
  const auto values = rng.normals(257);
  double prev = percentile(values, 0.01);
  for (double p = 0.05; p <= 1.0; p += 0.05) {
    const double cur = percentile(values, p);
    CHECK(cur >= prev);
    prev = cur;
  }
}

TEST_CASE("aggregation rules select the intended splits") {
  std::vector<HoldoutResult> results(4);
  results[0].split = {1900, 10, WindowPosition::endpoint};
  results[0].re = 0.4;
  results[1].split = {1901, 10, WindowPosition::interior};
  results[1].re = 0.1;
  results[2].split = {1902, 10, WindowPosition::interior};
  results[2].re = 0.2;
  results[3].split = {1903, 10, WindowPosition::endpoint};
  results[3].re = 0.8;

  CHECK(aggregate_re(results, Aggregation::mean_over_splits) == doctest::Approx(0.375));
  CHECK(aggregate_re(results, Aggregation::per_split) == doctest::Approx(0.375));
  CHECK(aggregate_re(results, Aggregation::endpoint_only) == doctest::Approx(0.6));

  results[1].degenerate = true;
  CHECK(aggregate_re(results, Aggregation::mean_over_splits) ==
        doctest::Approx((0.4 + 0.2 + 0.8) / 3.0));

  for (auto& r : results) r.degenerate = true;
  CHECK_THROWS_WITH_AS(aggregate_re(results, Aggregation::mean_over_splits),
                       doctest::Contains("no non-degenerate holdout splits"), NumericError);
}

TEST_CASE("aggregation labels") {
  CHECK(std::string(to_string(Aggregation::per_split)) == "per_split");
  CHECK(std::string(to_string(Aggregation::mean_over_splits)) == "mean_over_splits");
  CHECK(std::string(to_string(Aggregation::endpoint_only)) == "endpoint_only");
}

TEST_CASE("null ensembles are reproducible from the seed") {
  const auto f = small_fixture(1);
  const MethodSpec method{Method::lasso, 0.1, 1};
  const NullModelSpec null_spec{NullKind::white, std::nullopt};

  const auto a = run_null_ensemble(f.net, f.target, method, null_spec, 25, 20, RngSeed{42, 0});
  const auto b = run_null_ensemble(f.net, f.target, method, null_spec, 25, 20, RngSeed{42, 0});
  CHECK(a.re_values == b.re_values);
  CHECK(a.p95 == b.p95);

  const auto other = run_null_ensemble(f.net, f.target, method, null_spec, 25, 20, RngSeed{43, 0});
  CHECK(a.re_values != other.re_values);
}

TEST_CASE("ensemble shape follows the aggregation mode") {
  const auto f = small_fixture(2);
  const MethodSpec method{Method::lasso, 0.1, 1};
  const NullModelSpec null_spec{NullKind::white, std::nullopt};
  const int trials = 10;
  const int n_splits = 60 - 20 + 1;

  const auto mean_agg = run_null_ensemble(f.net, f.target, method, null_spec, trials, 20,
                                          RngSeed{7, 0}, Aggregation::mean_over_splits);
  CHECK(mean_agg.re_values.size() == static_cast<std::size_t>(trials));

  const auto per_split = run_null_ensemble(f.net, f.target, method, null_spec, trials, 20,
                                           RngSeed{7, 0}, Aggregation::per_split);
  CHECK(per_split.re_values.size() == static_cast<std::size_t>(trials * n_splits));

  const auto endpoint = run_null_ensemble(f.net, f.target, method, null_spec, trials, 20,
                                          RngSeed{7, 0}, Aggregation::endpoint_only);
  CHECK(endpoint.re_values.size() == static_cast<std::size_t>(trials));
  CHECK(endpoint.re_values != mean_agg.re_values);
}

TEST_CASE("intercept reconstructions give an all-zero null distribution") {
  const auto f = small_fixture(3);
  const auto ensemble = run_null_ensemble(f.net, f.target, {Method::intercept, std::nullopt, 1},
                                          {NullKind::white, std::nullopt}, 10, 20, RngSeed{1, 0});
  for (double re : ensemble.re_values) CHECK(re == 0.0);
  CHECK(ensemble.p50 == 0.0);
  CHECK(ensemble.p95 == 0.0);
  CHECK(ensemble.p99 == 0.0);
}

TEST_CASE("ensemble percentiles respect ordering and the re ceiling") {
  const auto f = small_fixture(4);
  const auto ensemble = run_null_ensemble(f.net, f.target, {Method::lasso, 0.05, 1},
                                          {NullKind::ar1_fixed, 0.4}, 40, 20, RngSeed{9, 0});
  CHECK(ensemble.p50 <= ensemble.p95);
  CHECK(ensemble.p95 <= ensemble.p99);
  for (double re : ensemble.re_values) CHECK(re <= 1.0);
}

TEST_CASE("single-trial percentiles collapse to that trial") {
  const auto f = small_fixture(5);
  const auto ensemble = run_null_ensemble(f.net, f.target, {Method::lasso, 0.1, 1},
                                          {NullKind::white, std::nullopt}, 1, 20, RngSeed{3, 0});
  REQUIRE(ensemble.re_values.size() == 1);
  CHECK(ensemble.p50 == ensemble.re_values[0]);
  CHECK(ensemble.p95 == ensemble.re_values[0]);
  CHECK(ensemble.p99 == ensemble.re_values[0]);
}

TEST_CASE("thread count does not change ensemble values") {
  const auto f = small_fixture(6);
  const MethodSpec method{Method::lasso, 0.1, 1};
  const NullModelSpec null_spec{NullKind::ar1_fixed, 0.25};
  const auto serial =
      run_null_ensemble(f.net, f.target, method, null_spec, 16, 20, RngSeed{11, 0},
                        Aggregation::mean_over_splits, 1);
  const auto threaded =
      run_null_ensemble(f.net, f.target, method, null_spec, 16, 20, RngSeed{11, 0},
                        Aggregation::mean_over_splits, 4);
  CHECK(serial.re_values == threaded.re_values);
}

TEST_CASE("verdicts require strict exceedance") {
  NullEnsemble ensemble;
  ensemble.p95 = 0.2;
  ensemble.p99 = 0.5;

  const auto above = make_verdict(0.6, ensemble);
  CHECK(above.significant95);
  CHECK(above.significant99);

  const auto tie = make_verdict(0.2, ensemble);
  CHECK_FALSE(tie.significant95);
  CHECK_FALSE(tie.significant99);

  const auto middle = make_verdict(0.3, ensemble);
  CHECK(middle.significant95);
  CHECK_FALSE(middle.significant99);
  CHECK(middle.re_proxy == 0.3);
  CHECK(middle.benchmark95 == 0.2);
  CHECK(middle.benchmark99 == 0.5);
}

TEST_CASE("trial failures name the trial and column") {
  auto f = small_fixture(7);
  for (int t = 0; t < f.net.n_years(); ++t) f.net.values(t, 1) = 9.0;  // constant column
  CHECK_THROWS_WITH_AS(
      run_null_ensemble(f.net, f.target, {Method::lasso, 0.1, 1},
                        {NullKind::ar1_empirical, std::nullopt}, 5, 20, RngSeed{1, 0}),
      doctest::Contains("trial 0: column 'p1'"), NumericError);
}

TEST_CASE("family comparisons share the real sweep across families") {
  const auto f = small_fixture(8);
  const MethodSpec method{Method::lasso, 0.05, 1};
  const std::vector<NullModelSpec> specs = {{NullKind::white, std::nullopt},
                                            {NullKind::ar1_fixed, 0.0},
                                            {NullKind::ar1_fixed, 0.5}};
  const auto cmp = compare_null_families(f.net, f.target, method, specs, 20, 20, RngSeed{21, 0});
  REQUIRE(cmp.families.size() == 3);
  for (const auto& fam : cmp.families) {
    CHECK(fam.verdict.re_proxy == cmp.re_proxy);
    CHECK(fam.summary.count == 20);
  }

  // White noise and an AR(1) with phi = 0 draw the same innovations, so the
  // two ensembles coincide exactly; a persistent family does not.
  CHECK(cmp.families[0].ensemble.re_values == cmp.families[1].ensemble.re_values);
  CHECK(cmp.families[0].ensemble.re_values != cmp.families[2].ensemble.re_values);

  const auto again = compare_null_families(f.net, f.target, method, specs, 20, 20, RngSeed{21, 0});
  CHECK(again.re_proxy == cmp.re_proxy);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    CHECK(again.families[i].ensemble.re_values == cmp.families[i].ensemble.re_values);
    CHECK(again.families[i].verdict.significant95 == cmp.families[i].verdict.significant95);
  }

  CHECK_THROWS_AS(compare_null_families(f.net, f.target, method, {}, 20, 20, RngSeed{21, 0}),
                  ConfigError);
}

TEST_CASE("ensembles reject nonsensical trial counts") {
  const auto f = small_fixture(9);
  CHECK_THROWS_AS(run_null_ensemble(f.net, f.target, {Method::lasso, 0.1, 1},
                                    {NullKind::white, std::nullopt}, 0, 20, RngSeed{1, 0}),
                  ConfigError);
}
