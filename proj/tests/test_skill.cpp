#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <optional>
#include <vector>

#include "helpers.hpp"
#include "proxybench/errors.hpp"
#include "proxybench/models.hpp"
#include "proxybench/skill.hpp"

using namespace proxybench;

namespace {

// Independent per-split oracle: refit with the public model API and score the
// holdout by hand. The sweep's prefix-sum shortcut must agree with this.
std::vector<HoldoutResult> manual_sweep(const ProxyNetwork& net, const TargetSeries& target,
                                        const MethodSpec& method, int holdout_length) {
  const auto overlap = intersect(net.axis, target.axis).value();
  std::vector<HoldoutResult> out;
  for (const auto& split : enumerate_splits(overlap, holdout_length)) {
    const auto calib = calibration_years(overlap, split);
    const auto held = holdout_years(split);
    std::vector<double> truth;
    for (int year : held) {
      truth.push_back(target.values[static_cast<std::size_t>(target.axis.index_of(year))]);
    }

    HoldoutResult r;
    r.split = split;
    r.method = method_tag(method);
    const auto model = fit_model(method, net, target, calib);
    r.rmse_model = rmse(predict(model, net, held).values, truth);
    const auto baseline = fit_intercept(target, calib);
    r.rmse_intercept = rmse(predict(baseline, net, held).values, truth);
    if (r.rmse_intercept == 0.0) {
      r.degenerate = true;
    } else {
      r.re = re_statistic(r.rmse_model, r.rmse_intercept);
    }
    out.push_back(r);
  }
  return out;
}

struct SyntheticCase {
  ProxyNetwork net;
  TargetSeries target;
};

// Proxies carrying a noisy copy of the target, with serial structure.
SyntheticCase make_case(std::uint64_t seed, int years = 149, int p = 6, double noise = 1.0) {
  testutil::FixtureRng rng(seed);
  SyntheticCase c;
  const auto signal = rng.ar1(years, 0.4);
  c.target = testutil::make_target(1850, signal);
  std::vector<std::string> ids;
  std::vector<std::vector<double>> cols;
  for (int j = 0; j < p; ++j) {
    ids.push_back("p" + std::to_string(j));
    std::vector<double> col(static_cast<std::size_t>(years));
    for (int t = 0; t < years; ++t) {
      col[static_cast<std::size_t>(t)] = signal[static_cast<std::size_t>(t)] + noise * rng.normal();
    }
    cols.push_back(std::move(col));
  }
  c.net = testutil::make_network(1850, ids, cols);
  return c;
}

}  // namespace

TEST_CASE("rmse arithmetic") {
  CHECK(rmse(std::vector<double>{0.0, 0.0}, std::vector<double>{3.0, 4.0}) ==
        doctest::Approx(std::sqrt(12.5)).epsilon(1e-15));
  CHECK(rmse(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.0}) == 0.0);
  CHECK_THROWS_AS(rmse(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}), ConfigError);
  CHECK_THROWS_AS(rmse(std::vector<double>{}, std::vector<double>{}), ConfigError);
}

TEST_CASE("re statistic arithmetic") {
  CHECK(re_statistic(1.0, 2.0) == 0.5);
  CHECK(re_statistic(2.0, 2.0) == 0.0);
  CHECK(re_statistic(2.0, 1.0) == -1.0);
  CHECK_THROWS_WITH_AS(re_statistic(1.0, 0.0), doctest::Contains("fits the holdout exactly"),
                       NumericError);
}

TEST_CASE("sweep covers every window in order") {
  const auto c = make_case(1);
  const auto results = holdout_sweep(c.net, c.target, {Method::intercept, std::nullopt, 1}, 30);
  REQUIRE(results.size() == 120);
  int endpoints = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (i > 0) CHECK(results[i].split.holdout_start == results[i - 1].split.holdout_start + 1);
    if (results[i].split.position == WindowPosition::endpoint) ++endpoints;
    CHECK(results[i].method == "intercept");
  }
  CHECK(endpoints == 2);
}

TEST_CASE("intercept judged against itself scores zero on every split") {
  const auto c = make_case(2);
  const auto results = holdout_sweep(c.net, c.target, {Method::intercept, std::nullopt, 1}, 30);
  for (const auto& r : results) {
    CHECK_FALSE(r.degenerate);
    CHECK(r.re == 0.0);
    CHECK(r.rmse_model == r.rmse_intercept);
  }
}

TEST_CASE("re identity holds on every sweep result") {
  const auto c = make_case(3);
  for (const MethodSpec spec : {MethodSpec{Method::lasso, 0.02, 1},
                                MethodSpec{Method::pcr, std::nullopt, 3}}) {
    for (const auto& r : holdout_sweep(c.net, c.target, spec, 30)) {
      REQUIRE_FALSE(r.degenerate);
      CHECK(r.re == 1.0 - r.rmse_model / r.rmse_intercept);
      CHECK(r.re <= 1.0);
    }
  }
}

TEST_CASE("a near-perfect proxy scores close to one") {
  // One column: three near-duplicates of the target would make the
  // coordinate-descent problem almost singular.
  auto c = make_case(4, 120, 1, 0.01);
  const auto results = holdout_sweep(c.net, c.target, {Method::lasso, 0.001, 1}, 30);
  for (const auto& r : results) {
    CHECK(r.re > 0.9);
    CHECK(r.re <= 1.0);
  }
}

TEST_CASE("re is invariant to target scaling and translation") {
  const auto c = make_case(5);

  auto scaled = c.target;
  for (auto& v : scaled.values) v *= 3.0;
  auto shifted = c.target;
  for (auto& v : shifted.values) v += 2.0;

  // Scale equivariance requires the fit itself to scale with the target,
  // which holds for the mean, least squares, and pcr; a fixed positive lasso
  // penalty deliberately does not rescale.
  const auto check_scale = [&](const MethodSpec& spec, double tol) {
    const auto base = holdout_sweep(c.net, c.target, spec, 30);
    const auto scaled_results = holdout_sweep(c.net, scaled, spec, 30);
    REQUIRE(scaled_results.size() == base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      CHECK(std::abs(scaled_results[i].re - base[i].re) <= tol);
      CHECK(scaled_results[i].rmse_model ==
            doctest::Approx(3.0 * base[i].rmse_model).epsilon(tol));
    }
  };
  check_scale({Method::intercept, std::nullopt, 1}, 1e-10);
  check_scale({Method::pcr, std::nullopt, 3}, 1e-10);
  // Coordinate descent stops on an absolute coefficient change, so under a
  // rescaled target it lands within solver tolerance rather than exactly.
  check_scale({Method::lasso, 0.0, 1}, 1e-8);

  // Translation invariance additionally holds for a penalized lasso: the
  // centered problem is unchanged, only the unpenalized intercept moves.
  for (const MethodSpec spec : {MethodSpec{Method::lasso, 0.05, 1},
                                MethodSpec{Method::pcr, std::nullopt, 3}}) {
    const auto base = holdout_sweep(c.net, c.target, spec, 30);
    const auto shifted_results = holdout_sweep(c.net, shifted, spec, 30);
    REQUIRE(shifted_results.size() == base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      CHECK(std::abs(shifted_results[i].re - base[i].re) <= 1e-10);
    }
  }
}

TEST_CASE("prefix-sum shortcut agrees with per-split refits") {
  const auto c = make_case(6, 100, 5);

  for (const MethodSpec spec : {MethodSpec{Method::intercept, std::nullopt, 1},
                                MethodSpec{Method::lasso, 0.03, 1},
                                MethodSpec{Method::lasso, 0.0, 1}}) {
    const auto fast = holdout_sweep(c.net, c.target, spec, 25);
    const auto slow = manual_sweep(c.net, c.target, spec, 25);
    REQUIRE(fast.size() == slow.size());
    for (std::size_t i = 0; i < fast.size(); ++i) {
      CHECK(fast[i].split.holdout_start == slow[i].split.holdout_start);
      CHECK(fast[i].rmse_model == doctest::Approx(slow[i].rmse_model).epsilon(1e-8));
      CHECK(fast[i].rmse_intercept == doctest::Approx(slow[i].rmse_intercept).epsilon(1e-8));
      CHECK(fast[i].re == doctest::Approx(slow[i].re).epsilon(1e-8));
    }
  }
}

TEST_CASE("per-split lambda selection runs the generic path and matches refits") {
  const auto c = make_case(7, 80, 4);
  const MethodSpec spec{Method::lasso, std::nullopt, 1};
  const auto swept = holdout_sweep(c.net, c.target, spec, 20);
  const auto manual = manual_sweep(c.net, c.target, spec, 20);
  REQUIRE(swept.size() == manual.size());
  for (std::size_t i = 0; i < swept.size(); ++i) {
    CHECK(swept[i].rmse_model == doctest::Approx(manual[i].rmse_model).epsilon(1e-10));
    CHECK(swept[i].re == doctest::Approx(manual[i].re).epsilon(1e-10));
  }
}

TEST_CASE("a gap that survives to prediction names the split and the proxy") {
  auto c = make_case(7, 100, 5);
  // Every overlap year lands in some holdout window, so a column with an
  // interior gap is calibration-complete for that window yet unusable for
  // predicting it; the sweep reports which split and proxy broke.
  c.net.mask(42, 2) = false;  // year 1892
  c.net.values(42, 2) = 0.0;

  try {
    holdout_sweep(c.net, c.target, {Method::lasso, 0.03, 1}, 25);
    FAIL("expected a data error");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("holdout window starting") != std::string::npos);
    CHECK(msg.find("proxy 'p2' is unavailable in year 1892") != std::string::npos);
  }
}

TEST_CASE("pcr sweeps match per-split refits") {
  const auto c = make_case(8, 90, 4);
  const MethodSpec spec{Method::pcr, std::nullopt, 2};
  const auto swept = holdout_sweep(c.net, c.target, spec, 30);
  const auto manual = manual_sweep(c.net, c.target, spec, 30);
  REQUIRE(swept.size() == manual.size());
  for (std::size_t i = 0; i < swept.size(); ++i) {
    CHECK(swept[i].rmse_model == doctest::Approx(manual[i].rmse_model).epsilon(1e-10));
  }
}

TEST_CASE("sweep results do not depend on the thread count") {
  const auto c = make_case(9, 120, 6);
  const MethodSpec spec{Method::lasso, 0.02, 1};
  const auto serial = holdout_sweep(c.net, c.target, spec, 30, 1);
  const auto parallel = holdout_sweep(c.net, c.target, spec, 30, 4);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].rmse_model == parallel[i].rmse_model);
    CHECK(serial[i].rmse_intercept == parallel[i].rmse_intercept);
    CHECK(serial[i].re == parallel[i].re);
  }
}

TEST_CASE("sweep uses only the instrumental overlap") {
  // Proxies run 1800-1998 but the target starts in 1850: windows must stay
  // inside 1850-1998.
  testutil::FixtureRng rng(10);
  const auto net = testutil::make_network(1800, {"a", "b"},
                                          {rng.normals(199), rng.normals(199)});
  const auto target = testutil::make_target(1850, rng.normals(149));
  const auto results = holdout_sweep(net, target, {Method::intercept, std::nullopt, 1}, 30);
  REQUIRE(results.size() == 120);
  CHECK(results.front().split.holdout_start == 1850);
  CHECK(results.back().split.holdout_start == 1969);
}

TEST_CASE("errors carry the offending window") {
  // A proxy that is constant over every calibration set breaks
  // standardization; the sweep must say which window was being scored.
  auto c = make_case(11, 80, 2);
  for (int t = 0; t < 80; ++t) c.net.values(t, 1) = 5.0;
  CHECK_THROWS_WITH_AS(holdout_sweep(c.net, c.target, {Method::lasso, 0.02, 1}, 30),
                       doctest::Contains("holdout window starting 1850"), NumericError);
}

TEST_CASE("constant targets make every window degenerate") {
  testutil::FixtureRng rng(12);
  const auto net = testutil::make_network(1900, {"a", "b"}, {rng.normals(60), rng.normals(60)});
  const auto target = testutil::make_target(1900, std::vector<double>(60, 1.25));
  const auto results = holdout_sweep(net, target, {Method::lasso, 0.1, 1}, 20);
  REQUIRE(results.size() == 41);
  for (const auto& r : results) {
    CHECK(r.degenerate);
    CHECK(r.re == 0.0);
  }
  const auto summary = summarize_by_position(results);
  CHECK(summary.degenerate_excluded == 41);
  CHECK(summary.endpoint_re.count == 0);
  CHECK(summary.interior_re.count == 0);
  CHECK(summary.endpoint_rmse.count == 2);
  CHECK(summary.interior_rmse.count == 39);
}

TEST_CASE("five-number summaries interpolate between order statistics") {
  const auto odd = summarize({5.0, 1.0, 3.0, 2.0, 4.0});
  CHECK(odd.count == 5);
  CHECK(odd.min == 1.0);
  CHECK(odd.q1 == 2.0);
  CHECK(odd.median == 3.0);
  CHECK(odd.q3 == 4.0);
  CHECK(odd.max == 5.0);
  CHECK(odd.mean == 3.0);

  const auto even = summarize({4.0, 1.0, 2.0, 3.0});
  CHECK(even.q1 == 1.75);
  CHECK(even.median == 2.5);
  CHECK(even.q3 == 3.25);
  CHECK(even.mean == 2.5);

  const auto single = summarize({7.0});
  CHECK(single.min == 7.0);
  CHECK(single.median == 7.0);
  CHECK(single.max == 7.0);

  const auto none = summarize({});
  CHECK(none.count == 0);
  CHECK(none.mean == 0.0);
}

TEST_CASE("position summaries split endpoint and interior windows") {
  const auto c = make_case(13, 100, 4);
  const auto results = holdout_sweep(c.net, c.target, {Method::lasso, 0.05, 1}, 30);
  const auto summary = summarize_by_position(results);
  CHECK(summary.endpoint_re.count == 2);
  CHECK(summary.interior_re.count == static_cast<int>(results.size()) - 2);
  CHECK(summary.degenerate_excluded == 0);
  CHECK(summary.endpoint_rmse.count == 2);
  CHECK(summary.interior_re.min <= summary.interior_re.q1);
  CHECK(summary.interior_re.q1 <= summary.interior_re.median);
  CHECK(summary.interior_re.median <= summary.interior_re.q3);
  CHECK(summary.interior_re.q3 <= summary.interior_re.max);
}
