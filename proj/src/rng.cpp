#include "uberledger/rng.hpp"

namespace uberledger {

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  // Largest multiple of bound representable; draws at or above it are rejected.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
  std::uint64_t x;
  do {
    x = next();
  } while (x > limit);
  return x % bound;
}

std::uint64_t derive_stream_seed(std::uint64_t run_seed, std::string_view subsystem) {
  // FNV-1a over the subsystem name, then one SplitMix64 step to decorrelate.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : subsystem) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  SplitMix64 mix(run_seed ^ h);
  return mix.next();
}

}  // namespace uberledger
