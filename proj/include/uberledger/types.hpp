#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace uberledger {

using LedgerId = std::string;
using Tick = std::uint64_t;

/// True when `s` is non-empty and free of whitespace and the characters
/// `<`, `>`, `"`, so it can be embedded in an IRI without escaping.
bool is_valid_label(std::string_view s) noexcept;

/// Throws std::invalid_argument naming `what` when `s` is not a valid label.
void require_valid_label(std::string_view s, std::string_view what);

struct AccountId {
  LedgerId ledger;
  std::string name;

  auto operator<=>(const AccountId&) const = default;
  bool operator==(const AccountId&) const = default;

  std::string to_string() const { return ledger + "/" + name; }
};

std::ostream& operator<<(std::ostream& os, const AccountId& a);

class AmountError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Non-negative count of smallest asset units. Underflow and overflow throw.
class Amount {
 public:
  constexpr Amount() = default;
  constexpr explicit Amount(std::uint64_t v) : value_(v) {}

  constexpr std::uint64_t value() const { return value_; }

  Amount operator+(Amount o) const {
    if (value_ > UINT64_MAX - o.value_) throw AmountError("amount overflow");
    return Amount{value_ + o.value_};
  }
  Amount operator-(Amount o) const {
    if (o.value_ > value_) throw AmountError("amount underflow");
    return Amount{value_ - o.value_};
  }
  Amount& operator+=(Amount o) { return *this = *this + o; }
  Amount& operator-=(Amount o) { return *this = *this - o; }

  auto operator<=>(const Amount&) const = default;
  bool operator==(const Amount&) const = default;

 private:
  std::uint64_t value_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, Amount a) { return os << a.value(); }

}  // namespace uberledger
