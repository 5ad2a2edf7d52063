#pragma once

#include "numforge/decimal.hpp"

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace numforge {

/// Seeded std::mt19937_64 stream. All draws are computed from raw engine
/// words, not std::*_distribution.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t uniform_below(std::uint64_t bound);

  /// Uniform integer in [0, bound). bound must be > 0.
  BigInt uniform_below(const BigInt& bound);

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform_unit();

  /// Child stream for one named unit of work (e.g. an instance id).
  static SeededRng derive(std::uint64_t seed, std::string_view key);

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

/// Derived stream seed: mix64(seed ^ mix64(fnv1a64(key))).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key);

/// Uniform m-subset of {0..n-1} by Fisher-Yates prefix, returned ascending.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t m, SeededRng& rng);

}  // namespace numforge
