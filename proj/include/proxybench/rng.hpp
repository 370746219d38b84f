#pragma once

#include <cstdint>
#include <random>

namespace proxybench {

// (seed, trial_index) fully determines a Monte-Carlo trial's random stream.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t trial_index = 0;
};

// SplitMix64 finalizer (Steele, Lea, Flood 2014) as a pure hash. Used only
// for stream-key derivation.
std::uint64_t mix64(std::uint64_t z);

// Stream key for (seed, trial, column): three rounds of mix64 with the trial
// and column indices XOR-folded in between. Documented in the README; every
// random draw in the toolkit flows from keys derived here.
std::uint64_t derive_stream_key(std::uint64_t seed, std::uint64_t trial, std::uint64_t column);

inline std::uint64_t derive_stream_key(const RngSeed& rng, std::uint64_t column) {
  return derive_stream_key(rng.seed, rng.trial_index, column);
}

// Deterministic standard-normal stream: std::mt19937_64 seeded with a stream
// key, mapped through the paired Box-Muller transform on 53-bit uniforms.
// std::normal_distribution is avoided because its algorithm is
// implementation-defined; this stream is reproducible for a fixed build.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t key) : engine_(key) {}

  double next();

  // Uniform draw in (0, 1]: (x >> 11) + 1 scaled by 2^-53.
  double uniform01();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace proxybench
