#include <doctest.h>

#include <set>

#include "uberledger/ntriples.hpp"
#include "uberledger/rng.hpp"

using namespace uberledger::rdf;

namespace {

const Iri s{"http://x.example/s"};
const Iri p{"http://x.example/p"};

std::vector<Triple> random_graph(uberledger::SplitMix64& rng) {
  static const std::string alphabet = "ab \"\\\n\r\t<>zé";
  std::vector<Triple> g;
  const auto count = rng.below(12);
  for (std::uint64_t i = 0; i < count; ++i) {
    Iri subj{"http://x.example/s" + std::to_string(rng.below(4))};
    Iri pred{"http://x.example/p" + std::to_string(rng.below(3))};
    switch (rng.below(3)) {
      case 0: g.push_back({subj, pred, Iri{"http://x.example/o" + std::to_string(rng.below(5))}}); break;
      case 1: g.push_back({subj, pred, integer_literal(rng.next())}); break;
      default: {
        std::string lex;
        const auto len = rng.below(6);
        for (std::uint64_t k = 0; k < len; ++k) lex += alphabet[rng.below(alphabet.size())];
        g.push_back({subj, pred, string_literal(lex)});
      }
    }
  }
  return g;
}

}  // namespace

TEST_CASE("empty input parses to an empty list") {
  CHECK(parse_ntriples("").empty());
  CHECK(serialize_ntriples({}).empty());
}

TEST_CASE("single triple line format") {
  const std::vector<Triple> g{{s, p, integer_literal(42)}};
  const auto text = serialize_ntriples(g);
  CHECK(text == "<http://x.example/s> <http://x.example/p> \"42\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n");
  CHECK(parse_ntriples(text) == g);
}

TEST_CASE("literal escapes survive the round trip") {
  const std::vector<Triple> g{{s, p, string_literal("a\"b\\c\nd\re\tf")}};
  const auto text = serialize_ntriples(g);
  CHECK(text.find("\\\"b\\\\c\\nd\\re\\tf") != std::string::npos);
  CHECK(parse_ntriples(text) == g);
}

TEST_CASE("syntax errors report the 1-based line") {
  const std::string good = "<http://a> <http://b> <http://c> .\n";
  try {
    parse_ntriples(good + good + "<http://a> <http://b> <http://c>\n");
    FAIL("expected syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_ntriples("<http://a> <http://b> \"unterminated .\n"), SyntaxError);
  CHECK(parse_ntriples("<http://a> <http://b> <http://c> .").size() == 1);  // final newline optional
}

TEST_CASE("serializer sorts and deduplicates") {
  const std::vector<Triple> g{{Iri{"http://z"}, p, Iri{"http://o"}},
                              {Iri{"http://a"}, p, Iri{"http://o"}},
                              {Iri{"http://a"}, p, Iri{"http://o"}}};
  const auto out = parse_ntriples(serialize_ntriples(g));
  REQUIRE(out.size() == 2);
  CHECK(out[0].subject.value == "http://a");
}

TEST_CASE("property: serialize is a fixpoint of parse and preserves the triple set") {
  uberledger::SplitMix64 rng(7);
  for (int i = 0; i < 300; ++i) {
    const auto g = random_graph(rng);
    const auto text = serialize_ntriples(g);
    const auto parsed = parse_ntriples(text);
    CHECK(serialize_ntriples(parsed) == text);
    CHECK(std::set<Triple>(parsed.begin(), parsed.end()) == std::set<Triple>(g.begin(), g.end()));
  }
}
