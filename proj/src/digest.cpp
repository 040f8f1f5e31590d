#include "uberledger/digest.hpp"

#include <openssl/sha.h>

#include <stdexcept>

namespace uberledger {

Digest sha256(std::span<const std::uint8_t> bytes) {
  Digest out;
  SHA256(bytes.data(), bytes.size(), out.data());
  return out;
}

std::string to_hex(const Digest& d) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s;
  s.reserve(d.size() * 2);
  for (auto b : d) {
    s.push_back(kHex[b >> 4]);
    s.push_back(kHex[b & 0x0f]);
  }
  return s;
}

namespace {
int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

Digest digest_from_hex(std::string_view hex) {
  if (hex.size() != 64) throw std::invalid_argument("digest hex must be 64 characters");
  Digest d;
  for (std::size_t i = 0; i < d.size(); ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("digest hex has a non-hex character");
    d[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return d;
}

CanonicalEncoder& CanonicalEncoder::u8(std::uint8_t v) {
  buf_.push_back(v);
  return *this;
}

CanonicalEncoder& CanonicalEncoder::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
  return *this;
}

CanonicalEncoder& CanonicalEncoder::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
  return *this;
}

CanonicalEncoder& CanonicalEncoder::str(std::string_view s) {
  if (s.size() > UINT32_MAX) throw std::length_error("string too long to encode");
  u32(static_cast<std::uint32_t>(s.size()));
  buf_.insert(buf_.end(), s.begin(), s.end());
  return *this;
}

CanonicalEncoder& CanonicalEncoder::digest(const Digest& d) {
  buf_.insert(buf_.end(), d.begin(), d.end());
  return *this;
}

}  // namespace uberledger
