#include "uberledger/types.hpp"

#include <algorithm>

namespace uberledger {

bool is_valid_label(std::string_view s) noexcept {
  if (s.empty()) return false;
  return std::none_of(s.begin(), s.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u <= 0x20 || u == 0x7f || c == '<' || c == '>' || c == '"';
  });
}

void require_valid_label(std::string_view s, std::string_view what) {
  if (!is_valid_label(s)) {
    throw std::invalid_argument(std::string(what) + " '" + std::string(s) +
                                "' must be non-empty without whitespace, '<', '>' or '\"'");
  }
}

std::ostream& operator<<(std::ostream& os, const AccountId& a) {
  return os << a.ledger << '/' << a.name;
}

}  // namespace uberledger
