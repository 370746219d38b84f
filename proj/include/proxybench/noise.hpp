#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "proxybench/rng.hpp"
#include "proxybench/series.hpp"

namespace proxybench {

// Stationary AR(1): x_t = phi * x_{t-1} + eps_t, eps_t ~ N(0, sigma^2).
struct Ar1Params {
  double phi = 0.0;    // |phi| <= 0.99 after clamping
  double sigma = 1.0;  // innovation standard deviation, > 0
};

enum class NullKind { white, ar1_fixed, ar1_empirical };

const char* to_string(NullKind kind);

struct NullModelSpec {
  NullKind kind = NullKind::white;
  std::optional<double> fixed_phi;  // required iff kind == ar1_fixed
};

// Human-readable family label, e.g. "white", "ar1_fixed(0.25)", "ar1_empirical".
std::string family_label(const NullModelSpec& spec);

// phi = lag-1 sample autocorrelation (centered, denominator over all terms),
// clamped to [-0.99, 0.99]; sigma = sample sd of the AR(1) residuals of the
// centered series. Throws NumericError for length < 3 or zero variance.
Ar1Params fit_ar1(std::span<const double> series);

// Longest contiguous run of available observations in a column (earliest run
// wins ties); used to fit AR(1) parameters across gaps.
std::vector<double> longest_available_run(const ProxyNetwork& net, int column);

// Unstandardized stationary path: x_0 ~ N(0, sigma^2 / (1 - phi^2)).
std::vector<double> ar1_path(const Ar1Params& params, int length, NormalStream& stream);

// One pseudoproxy of the given length, standardized to sample mean 0 / sd 1.
// The stream is derived from (rng.seed, rng.trial_index, column_index).
std::vector<double> gen_pseudoproxy(const NullModelSpec& spec,
                                    const std::optional<Ar1Params>& params, int length,
                                    const RngSeed& rng, std::uint64_t column_index = 0);

// One pseudoproxy per real column with the same availability mask; each
// column uses its own derived substream, and for ar1_empirical its own phi
// fitted from the real column.
ProxyNetwork gen_pseudo_network(const ProxyNetwork& net, const NullModelSpec& spec,
                                const RngSeed& rng);

}  // namespace proxybench
