// Copyright Contributors to the SCISplat Project
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic random numbers. Two flavours:
//  - Rng: a sequential splitmix64 stream for single-threaded sampling code.
//  - counter_uniform / counter_normal: stateless draws keyed by (seed, counter),
//    so per-pixel noise is reproducible for a given seed regardless of how work
//    is split across threads.
//
// std::mt19937 with the standard distributions is avoided on purpose: the
// distributions are implementation-defined, and tests freeze exact values.

#pragma once

#include <cmath>
#include <cstdint>

namespace scisplat {

namespace detail {
// splitmix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Sequential pseudo-random stream, fully specified (no stdlib distributions).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(detail::mix64(seed ^ 0x2545f4914f6cdd1dull)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return detail::mix64(state_);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_int(std::uint64_t n) {
    // 128-bit multiply-shift; bias is negligible and deterministic.
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Standard normal via Box-Muller.
  double normal() {
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

 private:
  std::uint64_t state_;
};

/// Stateless uniform in [0, 1) keyed by (seed, counter).
inline double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t h = detail::mix64(detail::mix64(seed) ^ counter);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Stateless standard normal keyed by (seed, counter).
inline double counter_normal(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t h1 = detail::mix64(detail::mix64(seed) ^ (2 * counter));
  const std::uint64_t h2 = detail::mix64(detail::mix64(seed) ^ (2 * counter + 1));
  const double u1 = static_cast<double>((h1 >> 11) + 1) * 0x1.0p-53;  // (0, 1]
  const double u2 = static_cast<double>(h2 >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

}  // namespace scisplat
