#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace tomonet {

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Stable 64-bit hash of a tag string (FNV-1a), used to key derived streams.
std::uint64_t hash_tag(std::string_view tag);

/// Derives an independent seed from a base seed and a path of keys.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys);

/// Seeded pseudo-random stream. Owned per call site; never shared across
/// threads.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal(double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }
  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
  }
  std::uint64_t binomial(std::uint64_t trials, double p);
  std::uint64_t next() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tomonet
