#pragma once

#include <cstdint>
#include <random>

namespace harqmac {

/// Seedable generator with explicit stream derivation.
///
/// Streams are keyed by (seed, stream id) through splitmix64 so that every
/// (sweep point, policy) pair owns an independent, reproducible sequence.
/// Uniform and exponential variates are derived from raw 64-bit output
/// directly, so sequences are identical across standard library vendors.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Unit-mean exponential variate.
  double exponential();

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer; used to decorrelate seeds.
std::uint64_t mix_seed(std::uint64_t value);

/// Deterministic stream id for a (point, policy) pair.
std::uint64_t stream_id(std::uint64_t point, std::uint64_t policy);

}  // namespace harqmac
