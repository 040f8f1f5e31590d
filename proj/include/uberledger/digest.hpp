#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uberledger {

/// SHA-256 output.
using Digest = std::array<std::uint8_t, 32>;

inline constexpr Digest kZeroDigest{};

Digest sha256(std::span<const std::uint8_t> bytes);

std::string to_hex(const Digest& d);
/// Parses 64 lowercase or uppercase hex digits; throws std::invalid_argument otherwise.
Digest digest_from_hex(std::string_view hex);

/// Canonical byte encoder used for every hashed structure: big-endian
/// fixed-width integers, strings as a u32 byte length followed by the raw bytes.
class CanonicalEncoder {
 public:
  CanonicalEncoder& u8(std::uint8_t v);
  CanonicalEncoder& u32(std::uint32_t v);
  CanonicalEncoder& u64(std::uint64_t v);
  CanonicalEncoder& str(std::string_view s);
  CanonicalEncoder& digest(const Digest& d);

  const std::vector<std::uint8_t>& bytes() const { return buf_; }
  Digest hash() const { return sha256(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

}  // namespace uberledger
