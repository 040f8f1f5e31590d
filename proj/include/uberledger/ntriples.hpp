#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace uberledger::rdf {

inline constexpr std::string_view kXsdString = "http://www.w3.org/2001/XMLSchema#string";
inline constexpr std::string_view kXsdInteger = "http://www.w3.org/2001/XMLSchema#integer";

struct Iri {
  std::string value;
  auto operator<=>(const Iri&) const = default;
};

struct Literal {
  std::string lexical;
  std::string datatype;  // IRI of the datatype
  auto operator<=>(const Literal&) const = default;
};

using Object = std::variant<Iri, Literal>;

struct Triple {
  Iri subject;
  Iri predicate;
  Object object;
  auto operator<=>(const Triple&) const = default;
};

Literal integer_literal(std::uint64_t v);
Literal string_literal(std::string s);

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// One `<s> <p> <o> .` line per triple, LF terminated, lines sorted bytewise
/// and deduplicated.
std::string serialize_ntriples(const std::vector<Triple>& triples);

/// Inverse of serialize_ntriples. Throws SyntaxError with a 1-based line
/// number on the first malformed line.
std::vector<Triple> parse_ntriples(std::string_view text);

/// Single line without the trailing newline.
std::string format_triple(const Triple& t);

}  // namespace uberledger::rdf
