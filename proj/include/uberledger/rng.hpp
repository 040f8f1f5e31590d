#pragma once

#include <cstdint>
#include <string_view>

namespace uberledger {

/// SplitMix64 (Steele, Lea, Flood 2014). Platform independent: pure 64-bit
/// integer arithmetic. Reference vector for seed 1234567:
/// 6457827717110365317, 3203168211198807973, 9817491932198370423.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). bound must be positive. Uses rejection
  /// sampling so the result is unbiased.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform integer in [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }

 private:
  std::uint64_t state_;
};

/// Seed for an independent stream named `subsystem`, derived from a run seed.
std::uint64_t derive_stream_seed(std::uint64_t run_seed, std::string_view subsystem);

}  // namespace uberledger
