#include "proxybench/rng.hpp"

#include <cmath>
#include <numbers>

namespace proxybench {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_stream_key(std::uint64_t seed, std::uint64_t trial, std::uint64_t column) {
  return mix64(mix64(mix64(seed) ^ trial) ^ column);
}

double NormalStream::uniform01() {
  return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace proxybench
