#include "proxybench/noise.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "proxybench/errors.hpp"

namespace proxybench {

namespace {

std::string format_phi(double phi) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), phi);
  return std::string(buf, res.ptr);
}

// Mean and sample variance (n-1 divisor) in one pass over the data.
void mean_and_sd(const std::vector<double>& v, double& mean, double& sd) {
  mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
}

}  // namespace

const char* to_string(NullKind kind) {
  switch (kind) {
    case NullKind::white: return "white";
    case NullKind::ar1_fixed: return "ar1_fixed";
    case NullKind::ar1_empirical: return "ar1_empirical";
  }
  throw ConfigError("unknown null model kind");
}

std::string family_label(const NullModelSpec& spec) {
  if (spec.kind == NullKind::ar1_fixed) {
    if (!spec.fixed_phi) throw ConfigError("ar1_fixed null model requires a phi value");
    return "ar1_fixed(" + format_phi(*spec.fixed_phi) + ")";
  }
  return to_string(spec.kind);
}

Ar1Params fit_ar1(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 3) {
    throw NumericError("fit_ar1 needs at least 3 observations, got " + std::to_string(n));
  }
  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(n);

  // Lag-1 autocorrelation with the full sum of squares in the denominator,
  // so |phi| < 1 automatically for any non-constant series.
  double num = 0.0;
  double den = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double c = series[t] - mean;
    den += c * c;
    if (t + 1 < n) num += c * (series[t + 1] - mean);
  }
  if (den <= 0.0) {
    throw NumericError("fit_ar1: series has zero variance");
  }
  const double phi = std::clamp(num / den, -0.99, 0.99);

  // Innovation scale from the one-step residuals of the centered series.
  std::vector<double> resid(n - 1);
  for (std::size_t t = 1; t < n; ++t) {
    resid[t - 1] = (series[t] - mean) - phi * (series[t - 1] - mean);
  }
  double rmean = 0.0;
  double rsd = 0.0;
  mean_and_sd(resid, rmean, rsd);
  if (rsd <= 0.0) {
    throw NumericError("fit_ar1: residuals have zero variance");
  }
  return Ar1Params{phi, rsd};
}

std::vector<double> longest_available_run(const ProxyNetwork& net, int column) {
  if (column < 0 || column >= net.n_proxies()) {
    throw DataError("longest_available_run: column index out of range");
  }
  int best_start = 0;
  int best_len = 0;
  int run_start = 0;
  int run_len = 0;
  for (int t = 0; t < net.n_years(); ++t) {
    if (net.mask(t, column)) {
      if (run_len == 0) run_start = t;
      ++run_len;
      if (run_len > best_len) {  // strict '>' keeps the earliest run on ties
        best_len = run_len;
        best_start = run_start;
      }
    } else {
      run_len = 0;
    }
  }
  std::vector<double> run(static_cast<std::size_t>(best_len));
  for (int t = 0; t < best_len; ++t) {
    run[static_cast<std::size_t>(t)] = net.values(best_start + t, column);
  }
  return run;
}

std::vector<double> ar1_path(const Ar1Params& params, int length, NormalStream& stream) {
  if (length < 1) throw ConfigError("ar1_path: length must be positive");
  if (std::abs(params.phi) >= 1.0) {
    throw ConfigError("ar1_path: |phi| must be < 1 for a stationary process");
  }
  if (params.sigma <= 0.0) throw ConfigError("ar1_path: sigma must be positive");

  std::vector<double> path(static_cast<std::size_t>(length));
  // Draw x_0 from the stationary distribution so the path has no transient.
  const double stationary_sd = params.sigma / std::sqrt(1.0 - params.phi * params.phi);
  path[0] = stationary_sd * stream.next();
  for (int t = 1; t < length; ++t) {
    path[static_cast<std::size_t>(t)] =
        params.phi * path[static_cast<std::size_t>(t - 1)] + params.sigma * stream.next();
  }
  return path;
}

std::vector<double> gen_pseudoproxy(const NullModelSpec& spec,
                                    const std::optional<Ar1Params>& params, int length,
                                    const RngSeed& rng, std::uint64_t column_index) {
  if (length < 1) throw ConfigError("gen_pseudoproxy: length must be positive");
  NormalStream stream(derive_stream_key(rng, column_index));

  std::vector<double> values;
  switch (spec.kind) {
    case NullKind::white:
      values.resize(static_cast<std::size_t>(length));
      for (auto& v : values) v = stream.next();
      break;
    case NullKind::ar1_fixed: {
      if (!spec.fixed_phi) throw ConfigError("ar1_fixed null model requires a phi value");
      if (std::abs(*spec.fixed_phi) >= 1.0) {
        throw ConfigError("ar1_fixed: |phi| must be < 1");
      }
      values = ar1_path(Ar1Params{*spec.fixed_phi, 1.0}, length, stream);
      break;
    }
    case NullKind::ar1_empirical:
      if (!params) {
        throw ConfigError("ar1_empirical pseudoproxy requires fitted AR(1) parameters");
      }
      values = ar1_path(*params, length, stream);
      break;
  }

  // Standardize after generation so every family hands downstream code a
  // series with sample mean 0 and sd 1. A length-1 series is only centered.
  double mean = 0.0;
  double sd = 0.0;
  mean_and_sd(values, mean, sd);
  for (auto& v : values) {
    v = sd > 0.0 ? (v - mean) / sd : v - mean;
  }
  return values;
}

ProxyNetwork gen_pseudo_network(const ProxyNetwork& net, const NullModelSpec& spec,
                                const RngSeed& rng) {
  ProxyNetwork pseudo;
  pseudo.axis = net.axis;
  pseudo.ids = net.ids;
  pseudo.values.resize(net.n_years(), net.n_proxies());
  pseudo.mask = net.mask;

  for (int j = 0; j < net.n_proxies(); ++j) {
    std::optional<Ar1Params> params;
    if (spec.kind == NullKind::ar1_empirical) {
      const auto run = longest_available_run(net, j);
      try {
        params = fit_ar1(run);
      } catch (const NumericError& e) {
        throw NumericError("column '" + net.ids[static_cast<std::size_t>(j)] +
                           "': " + e.what());
      }
    }
    // Generate over the full axis so autocorrelation respects real gaps, then
    // zero the masked cells to keep the carry-no-information invariant.
    const auto values = gen_pseudoproxy(spec, params, net.n_years(), rng,
                                        static_cast<std::uint64_t>(j));
    for (int t = 0; t < net.n_years(); ++t) {
      pseudo.values(t, j) = pseudo.mask(t, j) ? values[static_cast<std::size_t>(t)] : 0.0;
    }
  }
  return pseudo;
}

}  // namespace proxybench
