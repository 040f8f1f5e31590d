#include "uberledger/ntriples.hpp"

#include <algorithm>

namespace uberledger::rdf {

namespace {

bool is_iri_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u > 0x20 && u != 0x7f && c != '<' && c != '>' && c != '"';
}

void append_iri(std::string& out, const Iri& iri) {
  if (iri.value.empty() || !std::all_of(iri.value.begin(), iri.value.end(), is_iri_char)) {
    throw std::invalid_argument("cannot serialize IRI '" + iri.value + "'");
  }
  out.push_back('<');
  out += iri.value;
  out.push_back('>');
}

void append_literal(std::string& out, const Literal& lit) {
  out.push_back('"');
  for (char c : lit.lexical) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out += "\"^^";
  append_iri(out, Iri{lit.datatype});
}

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t number) : s_(line), line_(number) {}

  Triple parse() {
    Triple t;
    t.subject = iri("subject");
    space();
    t.predicate = iri("predicate");
    space();
    if (pos_ < s_.size() && s_[pos_] == '"') {
      t.object = literal();
    } else {
      t.object = iri("object");
    }
    if (s_.substr(pos_) != " .") fail("expected ' .' terminator");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const { throw SyntaxError(line_, why); }

  void space() {
    if (pos_ >= s_.size() || s_[pos_] != ' ') fail("expected a single space");
    ++pos_;
  }

  Iri iri(const char* what) {
    if (pos_ >= s_.size() || s_[pos_] != '<') fail(std::string("expected '<' opening ") + what);
    const auto close = s_.find('>', pos_ + 1);
    if (close == std::string_view::npos) fail(std::string("unterminated IRI in ") + what);
    Iri out{std::string(s_.substr(pos_ + 1, close - pos_ - 1))};
    if (out.value.empty() || !std::all_of(out.value.begin(), out.value.end(), is_iri_char)) {
      fail(std::string("invalid IRI in ") + what);
    }
    pos_ = close + 1;
    return out;
  }

  Literal literal() {
    ++pos_;  // opening quote
    Literal lit;
    for (;;) {
      if (pos_ >= s_.size()) fail("unterminated literal");
      const char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        lit.lexical.push_back(c);
        continue;
      }
      if (pos_ >= s_.size()) fail("dangling escape in literal");
      switch (s_[pos_++]) {
        case '"': lit.lexical.push_back('"'); break;
        case '\\': lit.lexical.push_back('\\'); break;
        case 'n': lit.lexical.push_back('\n'); break;
        case 'r': lit.lexical.push_back('\r'); break;
        case 't': lit.lexical.push_back('\t'); break;
        default: fail("unknown escape in literal");
      }
    }
    if (s_.substr(pos_, 2) != "^^") fail("literal lacks '^^' datatype tag");
    pos_ += 2;
    lit.datatype = iri("datatype").value;
    return lit;
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

}  // namespace

Literal integer_literal(std::uint64_t v) { return Literal{std::to_string(v), std::string(kXsdInteger)}; }

Literal string_literal(std::string s) { return Literal{std::move(s), std::string(kXsdString)}; }

std::string format_triple(const Triple& t) {
  std::string out;
  append_iri(out, t.subject);
  out.push_back(' ');
  append_iri(out, t.predicate);
  out.push_back(' ');
  if (const auto* iri = std::get_if<Iri>(&t.object)) {
    append_iri(out, *iri);
  } else {
    append_literal(out, std::get<Literal>(t.object));
  }
  out += " .";
  return out;
}

std::string serialize_ntriples(const std::vector<Triple>& triples) {
  std::vector<std::string> lines;
  lines.reserve(triples.size());
  for (const auto& t : triples) lines.push_back(format_triple(t));
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out.push_back('\n');
  }
  return out;
}

std::vector<Triple> parse_ntriples(std::string_view text) {
  std::vector<Triple> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    ++line_no;
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    out.push_back(LineParser(text.substr(start, end - start), line_no).parse());
    start = end + 1;
  }
  return out;
}

}  // namespace uberledger::rdf
