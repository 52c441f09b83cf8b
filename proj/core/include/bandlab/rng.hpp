// Copyright 2026 The bandlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace bandlab {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Stream key for a (seed, trial) pair. The salt breaks the symmetry
// between the two arguments.
constexpr std::uint64_t stream_key(std::uint64_t seed,
                                   std::uint64_t trial) noexcept {
  return mix64(mix64(seed) ^ mix64(trial ^ 0x9E3779B97F4A7C15ull));
}

// Counter-based generator: word(k) is a pure function of (key, k), so any
// draw can be evaluated at any time, in any order, on any thread, and the
// result is identical. word(k) equals the k-th output of SplitMix64
// seeded with the key, without the sequential state walk.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}
  CounterRng(std::uint64_t seed, std::uint64_t trial) noexcept
      : key_(stream_key(seed, trial)) {}

  std::uint64_t key() const noexcept { return key_; }

  std::uint64_t word(std::uint64_t counter) const noexcept {
    return mix64(key_ + counter * 0x9E3779B97F4A7C15ull);
  }

  // Uniform on the open interval (0, 1), 53-bit resolution. Never returns
  // an endpoint, so logarithms of it are finite.
  double uniform(std::uint64_t counter) const noexcept {
    return (static_cast<double>(word(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal pair by Box-Muller from counters (2k, 2k+1).
  std::pair<double, double> normal_pair(std::uint64_t pair_index) const noexcept {
    const double u1 = uniform(2 * pair_index);
    const double u2 = uniform(2 * pair_index + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(t), r * std::sin(t)};
  }

 private:
  std::uint64_t key_;
};

}  // namespace bandlab
