#pragma once

// Triple-graph substrate and its line-per-triple text form.
//
//   <subject> <predicate> <object-iri> .
//   <subject> <predicate> "lexical" .
//   <subject> <predicate> "lexical"^^<datatype-iri> .
//
// Literal escapes: \\ \" \n \r. Files list triples sorted bytewise by line,
// so equal graphs serialize to identical bytes.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "crowdkb/error.hpp"
#include "crowdkb/io.hpp"
#include "crowdkb/namespaces.hpp"
#include "crowdkb/text.hpp"

namespace crowdkb::rdf {

class Iri {
 public:
  explicit Iri(std::string value) : value_(std::move(value)) {
    if (!text::is_absolute_uri(value_)) {
      throw Error(ErrorCode::InvalidIri, "'" + value_ + "'");
    }
  }

  const std::string& value() const { return value_; }

  // Orders before every valid IRI; only for range lookups.
  static Iri lowest() { return Iri(); }

  friend auto operator<=>(const Iri&, const Iri&) = default;
  friend bool operator==(const Iri&, const Iri&) = default;

 private:
  Iri() = default;

  std::string value_;
};

enum class Datatype { String, Integer, Year };

inline std::string_view datatype_iri(Datatype d) {
  switch (d) {
    case Datatype::String: return "";
    case Datatype::Integer: return ns::kXsdInteger;
    case Datatype::Year: return ns::kXsdYear;
  }
  return "";
}

struct Literal {
  std::string lexical;
  Datatype datatype = Datatype::String;

  static Literal string(std::string s) { return {std::move(s), Datatype::String}; }
  static Literal integer(std::int64_t v) {
    return {std::to_string(v), Datatype::Integer};
  }
  static Literal year(int y) { return {std::to_string(y), Datatype::Year}; }

  // Integer value of an Integer or Year literal.
  std::optional<std::int64_t> number() const {
    if (datatype == Datatype::String) return std::nullopt;
    return text::parse_int<std::int64_t>(lexical);
  }

  friend auto operator<=>(const Literal&, const Literal&) = default;
  friend bool operator==(const Literal&, const Literal&) = default;
};

using Node = std::variant<Iri, Literal>;

inline bool is_iri(const Node& n) { return std::holds_alternative<Iri>(n); }

struct Triple {
  Iri subject;
  Iri predicate;
  Node object;

  friend auto operator<=>(const Triple&, const Triple&) = default;
  friend bool operator==(const Triple&, const Triple&) = default;
};

using PrefixMap = std::map<std::string, std::string>;

inline PrefixMap default_prefixes() {
  return {{"", std::string(ns::kOntology)},
          {"kb", std::string(ns::kOntology)},
          {"res", std::string(ns::kResource)},
          {"rdf", std::string(ns::kRdf)},
          {"xsd", std::string(ns::kXsd)}};
}

// Set of triples plus the prefix map used to expand prefixed names.
class Graph {
 public:
  Graph() : prefixes_(default_prefixes()) {}

  bool insert(Triple t) { return triples_.insert(std::move(t)).second; }
  bool insert(Iri s, Iri p, Node o) {
    return insert(Triple{std::move(s), std::move(p), std::move(o)});
  }
  bool contains(const Triple& t) const { return triples_.count(t) > 0; }

  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }
  const std::set<Triple>& triples() const { return triples_; }

  const PrefixMap& prefixes() const { return prefixes_; }
  void set_prefix(std::string prefix, std::string iri) {
    prefixes_[std::move(prefix)] = std::move(iri);
  }

  std::vector<Node> objects(const Iri& s, const Iri& p) const {
    std::vector<Node> out;
    for (auto it = triples_.lower_bound(Triple{s, p, Node{Iri::lowest()}});
         it != triples_.end() && it->subject == s && it->predicate == p; ++it) {
      out.push_back(it->object);
    }
    return out;
  }

  std::set<Iri> subjects() const {
    std::set<Iri> out;
    for (const Triple& t : triples_) out.insert(t.subject);
    return out;
  }

  std::set<Iri> predicates() const {
    std::set<Iri> out;
    for (const Triple& t : triples_) out.insert(t.predicate);
    return out;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.triples_ == b.triples_;
  }

 private:
  std::set<Triple> triples_;
  PrefixMap prefixes_;
};

// ---------------------------------------------------------------------------
// Text form

inline std::string escape_literal(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string format_node(const Node& n) {
  if (const Iri* iri = std::get_if<Iri>(&n)) return "<" + iri->value() + ">";
  const Literal& lit = std::get<Literal>(n);
  std::string out = "\"" + escape_literal(lit.lexical) + "\"";
  if (lit.datatype != Datatype::String) {
    out += "^^<" + std::string(datatype_iri(lit.datatype)) + ">";
  }
  return out;
}

inline std::string format_triple(const Triple& t) {
  return "<" + t.subject.value() + "> <" + t.predicate.value() + "> " +
         format_node(t.object) + " .";
}

inline std::string serialize(const Graph& g) {
  std::vector<std::string> lines;
  lines.reserve(g.size());
  for (const Triple& t : g.triples()) lines.push_back(format_triple(t));
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const std::string& l : lines) {
    out += l;
    out.push_back('\n');
  }
  return out;
}

inline void serialize_graph(const Graph& g, const std::filesystem::path& path) {
  io::write_file(path, serialize(g));
}

namespace detail {

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_no)
      : s_(line), line_no_(line_no) {}

  Triple parse() {
    Iri subject = parse_iri();
    Iri predicate = parse_iri();
    skip_ws();
    Node object = peek() == '"' ? Node{parse_literal()} : Node{parse_iri()};
    skip_ws();
    expect('.');
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters");
    return Triple{std::move(subject), std::move(predicate), std::move(object)};
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::SyntaxError,
                "line " + std::to_string(line_no_) + ", column " +
                    std::to_string(pos_ + 1) + ": " + what);
  }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  Iri parse_iri() {
    skip_ws();
    expect('<');
    std::size_t end = s_.find('>', pos_);
    if (end == std::string_view::npos) fail("unterminated IRI");
    std::string value(s_.substr(pos_, end - pos_));
    if (!text::is_absolute_uri(value)) fail("invalid IRI '" + value + "'");
    pos_ = end + 1;
    return Iri(std::move(value));
  }

  Literal parse_literal() {
    expect('"');
    std::string lex;
    for (;;) {
      if (pos_ >= s_.size()) fail("unterminated literal");
      char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        lex.push_back(c);
        continue;
      }
      if (pos_ >= s_.size()) fail("dangling escape");
      char e = s_[pos_++];
      switch (e) {
        case '\\': lex.push_back('\\'); break;
        case '"': lex.push_back('"'); break;
        case 'n': lex.push_back('\n'); break;
        case 'r': lex.push_back('\r'); break;
        default: --pos_; fail(std::string("unknown escape \\") + e);
      }
    }
    Literal lit{std::move(lex), Datatype::String};
    if (s_.substr(pos_, 2) == "^^") {
      pos_ += 2;
      Iri dt = parse_iri();
      if (dt.value() == ns::kXsdInteger) {
        lit.datatype = Datatype::Integer;
      } else if (dt.value() == ns::kXsdYear) {
        lit.datatype = Datatype::Year;
      } else {
        fail("unsupported datatype <" + dt.value() + ">");
      }
      if (!lit.number()) fail("'" + lit.lexical + "' is not an integer");
    }
    return lit;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_no_;
};

}  // namespace detail

inline Graph parse(std::string_view contents) {
  Graph g;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= contents.size()) {
    std::size_t end = contents.find('\n', start);
    if (end == std::string_view::npos) end = contents.size();
    std::string_view line = contents.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    start = end + 1;
    std::string_view trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    g.insert(detail::LineParser(line, line_no).parse());
  }
  return g;
}

inline Graph parse_graph(const std::filesystem::path& path) {
  return parse(io::read_file(path));
}

}  // namespace crowdkb::rdf
