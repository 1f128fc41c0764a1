#pragma once

// A small conjunctive graph-pattern language:
//
//   select ?t ?y where {
//     ?t hasComposer ?c .
//     ?c birthYear ?y .
//   } filter ?y <= 1900
//
// Keywords are case-insensitive. Terms are ?variables, <full-iris>,
// prefix:local names, bare names (the default prefix), `a`/`type` for
// rdf:type, "strings" with an optional ^^integer / ^^year / ^^string /
// ^^<datatype-iri> suffix, and plain integers. `#` starts a comment.

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "crowdkb/csv.hpp"
#include "crowdkb/error.hpp"
#include "crowdkb/namespaces.hpp"
#include "crowdkb/rdf.hpp"
#include "crowdkb/text.hpp"

namespace crowdkb::query {

using rdf::Graph;
using rdf::Iri;
using rdf::Literal;
using rdf::Node;
using rdf::Triple;

struct Variable {
  std::string name;
  friend auto operator<=>(const Variable&, const Variable&) = default;
  friend bool operator==(const Variable&, const Variable&) = default;
};

using PatternTerm = std::variant<Iri, Literal, Variable>;

struct Pattern {
  PatternTerm subject;
  PatternTerm predicate;
  PatternTerm object;
  friend bool operator==(const Pattern&, const Pattern&) = default;
};

enum class Comparator { Eq, Ne, Lt, Le, Gt, Ge };

inline std::string_view comparator_symbol(Comparator c) {
  switch (c) {
    case Comparator::Eq: return "=";
    case Comparator::Ne: return "!=";
    case Comparator::Lt: return "<";
    case Comparator::Le: return "<=";
    case Comparator::Gt: return ">";
    case Comparator::Ge: return ">=";
  }
  return "=";
}

struct Filter {
  std::string variable;
  Comparator op = Comparator::Eq;
  Literal value;
  friend bool operator==(const Filter&, const Filter&) = default;
};

struct QueryAst {
  std::vector<std::string> select_vars;
  std::vector<Pattern> patterns;
  std::vector<Filter> filters;
  friend bool operator==(const QueryAst&, const QueryAst&) = default;
};

struct BindingTable {
  std::vector<std::string> header;
  std::vector<std::vector<Node>> rows;
  friend bool operator==(const BindingTable&, const BindingTable&) = default;
};

// True when `value op bound` holds. Integer and year literals compare
// numerically with each other, strings lexically; anything else is no match.
inline bool compare(const Node& bound, Comparator op, const Literal& value) {
  const Literal* lit = std::get_if<Literal>(&bound);
  if (!lit) return false;
  int cmp = 0;
  bool lit_numeric = lit->datatype != rdf::Datatype::String;
  bool value_numeric = value.datatype != rdf::Datatype::String;
  if (lit_numeric != value_numeric) return false;
  if (lit_numeric) {
    auto a = lit->number();
    auto b = value.number();
    if (!a || !b) return false;
    cmp = *a < *b ? -1 : (*a > *b ? 1 : 0);
  } else {
    int c = lit->lexical.compare(value.lexical);
    cmp = c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  switch (op) {
    case Comparator::Eq: return cmp == 0;
    case Comparator::Ne: return cmp != 0;
    case Comparator::Lt: return cmp < 0;
    case Comparator::Le: return cmp <= 0;
    case Comparator::Gt: return cmp > 0;
    case Comparator::Ge: return cmp >= 0;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class QueryParser {
 public:
  QueryParser(std::string_view text, const rdf::PrefixMap& prefixes)
      : s_(text), prefixes_(prefixes) {}

  QueryAst parse() {
    QueryAst ast;
    skip_ws();
    expect_keyword("select");
    skip_ws();
    while (peek() == '?') {
      Position at = here();
      std::string v = parse_variable();
      if (std::find(ast.select_vars.begin(), ast.select_vars.end(), v) !=
          ast.select_vars.end()) {
        fail(at, "duplicate select variable ?" + v);
      }
      ast.select_vars.push_back(std::move(v));
      skip_ws();
    }
    if (ast.select_vars.empty()) fail(here(), "expected a variable after select");
    expect_keyword("where");
    skip_ws();
    expect('{');
    skip_ws();
    while (peek() != '}') {
      if (at_end()) fail(here(), "expected '}'");
      ast.patterns.push_back(parse_pattern());
      skip_ws();
      if (peek() == '.') {
        ++pos_;
        skip_ws();
      } else if (peek() != '}') {
        fail(here(), "expected '.' or '}'");
      }
    }
    if (ast.patterns.empty()) fail(here(), "query needs at least one pattern");
    ++pos_;
    skip_ws();
    std::vector<Position> filter_positions;
    while (!at_end()) {
      filter_positions.push_back(here());
      expect_keyword("filter");
      skip_ws();
      ast.filters.push_back(parse_filter());
      skip_ws();
    }
    check_variables(ast, filter_positions);
    return ast;
  }

 private:
  struct Position {
    std::size_t line = 1;
    std::size_t column = 1;
  };

  [[noreturn]] void fail(Position at, const std::string& what,
                         ErrorCode code = ErrorCode::SyntaxError) const {
    throw Error(code, "line " + std::to_string(at.line) + ", column " +
                          std::to_string(at.column) + ": " + what);
  }

  Position here() const {
    Position p;
    for (std::size_t i = 0; i < pos_ && i < s_.size(); ++i) {
      if (s_[i] == '\n') {
        ++p.line;
        p.column = 1;
      } else {
        ++p.column;
      }
    }
    return p;
  }

  bool at_end() const { return pos_ >= s_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0';
  }

  void skip_ws() {
    while (!at_end()) {
      char c = s_[pos_];
      if (c == '#') {
        while (!at_end() && s_[pos_] != '\n') ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  void expect(char c) {
    if (peek() != c) fail(here(), std::string("expected '") + c + "'");
    ++pos_;
  }

  static bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
           c == ':' || c == '/' || c == '%' || static_cast<unsigned char>(c) >= 0x80;
  }

  std::string_view read_name() {
    std::size_t start = pos_;
    while (!at_end() && is_name_char(s_[pos_])) ++pos_;
    return s_.substr(start, pos_ - start);
  }

  void expect_keyword(std::string_view kw) {
    Position at = here();
    std::size_t start = pos_;
    std::string_view word = read_name();
    if (!text::iequals(word, kw)) {
      pos_ = start;
      fail(at, "expected '" + std::string(kw) + "'");
    }
  }

  std::string parse_variable() {
    expect('?');
    std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
                         s_[pos_] == '_')) {
      ++pos_;
    }
    if (pos_ == start) fail(here(), "expected a variable name");
    return std::string(s_.substr(start, pos_ - start));
  }

  Iri parse_iri_ref() {
    Position at = here();
    expect('<');
    std::size_t end = s_.find('>', pos_);
    if (end == std::string_view::npos) fail(at, "unterminated IRI");
    std::string value(s_.substr(pos_, end - pos_));
    if (!text::is_absolute_uri(value)) fail(at, "invalid IRI '" + value + "'");
    pos_ = end + 1;
    return Iri(std::move(value));
  }

  Iri expand_name(Position at, std::string_view name) {
    if (name == "a" || name == "type") return Iri(std::string(ns::kRdfType));
    std::size_t colon = name.find(':');
    std::string prefix = colon == std::string_view::npos
                             ? std::string()
                             : std::string(name.substr(0, colon));
    std::string_view local =
        colon == std::string_view::npos ? name : name.substr(colon + 1);
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) {
      fail(at, "unknown prefix '" + prefix + ":'", ErrorCode::UnknownPrefix);
    }
    std::string full = it->second + std::string(local);
    if (!text::is_absolute_uri(full)) fail(at, "invalid IRI '" + full + "'");
    return Iri(std::move(full));
  }

  rdf::Datatype parse_datatype() {
    Position at = here();
    std::string iri;
    if (peek() == '<') {
      iri = parse_iri_ref().value();
    } else {
      std::string_view name = read_name();
      if (name == "integer") return rdf::Datatype::Integer;
      if (name == "year") return rdf::Datatype::Year;
      if (name == "string") return rdf::Datatype::String;
      if (name.empty()) fail(at, "expected a datatype");
      iri = expand_name(at, name).value();
    }
    if (iri == ns::kXsdInteger) return rdf::Datatype::Integer;
    if (iri == ns::kXsdYear) return rdf::Datatype::Year;
    if (iri == std::string(ns::kXsd) + "string") return rdf::Datatype::String;
    fail(at, "unsupported datatype <" + iri + ">");
  }

  Literal parse_literal() {
    Position at = here();
    if (peek() == '-' || std::isdigit(static_cast<unsigned char>(peek()))) {
      std::size_t start = pos_;
      if (peek() == '-') ++pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      std::string_view digits = s_.substr(start, pos_ - start);
      auto v = text::parse_int<std::int64_t>(digits);
      if (!v) fail(at, "malformed integer '" + std::string(digits) + "'");
      return Literal::integer(*v);
    }
    expect('"');
    std::string lex;
    for (;;) {
      if (at_end()) fail(at, "unterminated string");
      char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        lex.push_back(c);
        continue;
      }
      char e = peek();
      ++pos_;
      switch (e) {
        case '\\': lex.push_back('\\'); break;
        case '"': lex.push_back('"'); break;
        case 'n': lex.push_back('\n'); break;
        case 'r': lex.push_back('\r'); break;
        case 't': lex.push_back('\t'); break;
        default: --pos_; fail(here(), std::string("unknown escape \\") + e);
      }
    }
    Literal lit = Literal::string(std::move(lex));
    if (peek() == '^' && peek(1) == '^') {
      pos_ += 2;
      lit.datatype = parse_datatype();
      if (lit.datatype != rdf::Datatype::String && !lit.number()) {
        fail(at, "'" + lit.lexical + "' is not an integer");
      }
    }
    return lit;
  }

  PatternTerm parse_term(bool literal_allowed) {
    Position at = here();
    char c = peek();
    if (c == '?') return Variable{parse_variable()};
    if (c == '<') return parse_iri_ref();
    if (c == '"' || c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      if (!literal_allowed) fail(at, "a literal may only appear as an object");
      return parse_literal();
    }
    std::string_view name = read_name();
    if (name.empty()) fail(at, "expected a term");
    return expand_name(at, name);
  }

  Pattern parse_pattern() {
    PatternTerm subject = parse_term(false);
    skip_ws();
    PatternTerm predicate = parse_term(false);
    skip_ws();
    return Pattern{std::move(subject), std::move(predicate), parse_term(true)};
  }

  Filter parse_filter() {
    Filter f;
    if (peek() != '?') fail(here(), "expected a variable after filter");
    f.variable = parse_variable();
    skip_ws();
    Position at = here();
    static const std::vector<std::pair<std::string_view, Comparator>> ops = {
        {"<=", Comparator::Le},      {">=", Comparator::Ge},
        {"!=", Comparator::Ne},      {"<>", Comparator::Ne},
        {"\xE2\x89\xA0", Comparator::Ne}, {"\xE2\x89\xA4", Comparator::Le},
        {"\xE2\x89\xA5", Comparator::Ge}, {"=", Comparator::Eq},
        {"<", Comparator::Lt},       {">", Comparator::Gt}};
    bool found = false;
    for (const auto& [sym, op] : ops) {
      if (s_.substr(pos_, sym.size()) == sym) {
        f.op = op;
        pos_ += sym.size();
        found = true;
        break;
      }
    }
    if (!found) fail(at, "expected a comparison operator");
    skip_ws();
    if (peek() != '"' && peek() != '-' &&
        !std::isdigit(static_cast<unsigned char>(peek()))) {
      fail(here(), "expected a literal");
    }
    f.value = parse_literal();
    return f;
  }

  void check_variables(const QueryAst& ast,
                       const std::vector<Position>& filter_positions) const {
    std::set<std::string> any, as_object;
    for (const Pattern& p : ast.patterns) {
      for (const PatternTerm* t : {&p.subject, &p.predicate, &p.object}) {
        if (const Variable* v = std::get_if<Variable>(t)) any.insert(v->name);
      }
      if (const Variable* v = std::get_if<Variable>(&p.object)) {
        as_object.insert(v->name);
      }
    }
    Position start;
    for (const std::string& v : ast.select_vars) {
      if (!any.count(v)) {
        fail(start, "?" + v + " does not appear in any pattern",
             ErrorCode::UnboundSelectVariable);
      }
    }
    for (std::size_t i = 0; i < ast.filters.size(); ++i) {
      const std::string& v = ast.filters[i].variable;
      if (!any.count(v)) {
        fail(filter_positions[i], "?" + v + " does not appear in any pattern",
             ErrorCode::UnboundSelectVariable);
      }
      if (!as_object.count(v)) {
        fail(filter_positions[i],
             "?" + v + " only binds IRIs and cannot compare with a literal",
             ErrorCode::TypeMismatch);
      }
    }
  }

  std::string_view s_;
  const rdf::PrefixMap& prefixes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline QueryAst parse_query(std::string_view text,
                            const rdf::PrefixMap& prefixes = rdf::default_prefixes()) {
  return detail::QueryParser(text, prefixes).parse();
}

// ---------------------------------------------------------------------------
// Printing

inline std::string format_literal(const Literal& lit) {
  switch (lit.datatype) {
    case rdf::Datatype::Integer: return lit.lexical;
    case rdf::Datatype::Year: return "\"" + lit.lexical + "\"^^year";
    case rdf::Datatype::String: break;
  }
  return "\"" + rdf::escape_literal(lit.lexical) + "\"";
}

inline std::string format_term(const PatternTerm& t) {
  if (const Variable* v = std::get_if<Variable>(&t)) return "?" + v->name;
  if (const Iri* i = std::get_if<Iri>(&t)) return "<" + i->value() + ">";
  return format_literal(std::get<Literal>(t));
}

inline std::string format_query(const QueryAst& ast) {
  std::string out = "select";
  for (const std::string& v : ast.select_vars) out += " ?" + v;
  out += " where {\n";
  for (const Pattern& p : ast.patterns) {
    out += "  " + format_term(p.subject) + " " + format_term(p.predicate) + " " +
           format_term(p.object) + " .\n";
  }
  out += "}";
  for (const Filter& f : ast.filters) {
    out += "\nfilter ?" + f.variable + " " + std::string(comparator_symbol(f.op)) +
           " " + format_literal(f.value);
  }
  out += "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

using Bindings = std::map<std::string, Node>;

class Evaluator {
 public:
  Evaluator(const QueryAst& ast, const Graph& g) : ast_(ast), g_(g) {
    for (const Triple& t : g.triples()) by_predicate_[t.predicate].push_back(&t);
  }

  std::set<std::vector<Node>> run() {
    std::vector<bool> used(ast_.patterns.size(), false);
    Bindings b;
    search(b, used, 0);
    return rows_;
  }

 private:
  // Node bound to a term under b, if any.
  static const Node* resolve(const PatternTerm& t, const Bindings& b, Node& tmp) {
    if (const Variable* v = std::get_if<Variable>(&t)) {
      auto it = b.find(v->name);
      return it == b.end() ? nullptr : &it->second;
    }
    if (const Iri* i = std::get_if<Iri>(&t)) {
      tmp = *i;
    } else {
      tmp = std::get<Literal>(t);
    }
    return &tmp;
  }

  int bound_count(const Pattern& p, const Bindings& b) const {
    Node tmp = Literal{};
    int n = 0;
    for (const PatternTerm* t : {&p.subject, &p.predicate, &p.object}) {
      if (resolve(*t, b, tmp)) ++n;
    }
    return n;
  }

  // Extends b with the bindings t implies for p; false on conflict.
  static bool unify(const PatternTerm& term, const Node& value, Bindings& b,
                    std::vector<std::string>& added) {
    if (const Variable* v = std::get_if<Variable>(&term)) {
      auto [it, inserted] = b.emplace(v->name, value);
      if (inserted) {
        added.push_back(v->name);
        return true;
      }
      return it->second == value;
    }
    if (const Iri* i = std::get_if<Iri>(&term)) return value == Node{*i};
    return value == Node{std::get<Literal>(term)};
  }

  bool filters_hold(const Bindings& b, const std::vector<std::string>& added) const {
    for (const Filter& f : ast_.filters) {
      if (std::find(added.begin(), added.end(), f.variable) == added.end()) continue;
      if (!compare(b.at(f.variable), f.op, f.value)) return false;
    }
    return true;
  }

  std::vector<const Triple*> candidates(const Pattern& p, const Bindings& b) const {
    Node ts = Literal{}, tp = Literal{};
    const Node* s = resolve(p.subject, b, ts);
    const Node* pr = resolve(p.predicate, b, tp);
    std::vector<const Triple*> out;
    if (pr && !std::holds_alternative<Iri>(*pr)) return out;
    if (s && !std::holds_alternative<Iri>(*s)) return out;
    if (pr) {
      auto it = by_predicate_.find(std::get<Iri>(*pr));
      if (it == by_predicate_.end()) return out;
      if (!s) return it->second;
      const Iri& si = std::get<Iri>(*s);
      const Iri& pi = std::get<Iri>(*pr);
      auto lo = g_.triples().lower_bound(Triple{si, pi, Node{Iri::lowest()}});
      for (; lo != g_.triples().end() && lo->subject == si && lo->predicate == pi; ++lo) {
        out.push_back(&*lo);
      }
      return out;
    }
    for (const Triple& t : g_.triples()) out.push_back(&t);
    return out;
  }

  void search(Bindings& b, std::vector<bool>& used, std::size_t depth) {
    if (depth == ast_.patterns.size()) {
      std::vector<Node> row;
      row.reserve(ast_.select_vars.size());
      for (const std::string& v : ast_.select_vars) row.push_back(b.at(v));
      rows_.insert(std::move(row));
      return;
    }
    // Most-bound pattern next; ties go to the earliest.
    std::size_t next = ast_.patterns.size();
    int best = -1;
    for (std::size_t i = 0; i < ast_.patterns.size(); ++i) {
      if (used[i]) continue;
      int n = bound_count(ast_.patterns[i], b);
      if (n > best) {
        best = n;
        next = i;
      }
    }
    const Pattern& p = ast_.patterns[next];
    used[next] = true;
    for (const Triple* t : candidates(p, b)) {
      std::vector<std::string> added;
      bool ok = unify(p.subject, Node{t->subject}, b, added) &&
                unify(p.predicate, Node{t->predicate}, b, added) &&
                unify(p.object, t->object, b, added) && filters_hold(b, added);
      if (ok) search(b, used, depth + 1);
      for (const std::string& v : added) b.erase(v);
    }
    used[next] = false;
  }

  const QueryAst& ast_;
  const Graph& g_;
  std::map<Iri, std::vector<const Triple*>> by_predicate_;
  std::set<std::vector<Node>> rows_;
};

}  // namespace detail

inline std::string cell_text(const Node& n) {
  if (const Iri* i = std::get_if<Iri>(&n)) return i->value();
  return std::get<Literal>(n).lexical;
}

// Rows are distinct and ordered by their serialized cells.
inline BindingTable evaluate_query(const QueryAst& ast, const Graph& g) {
  BindingTable table;
  for (const std::string& v : ast.select_vars) table.header.push_back(v);
  auto rows = detail::Evaluator(ast, g).run();
  std::vector<std::pair<std::vector<std::string>, std::vector<Node>>> keyed;
  keyed.reserve(rows.size());
  for (const auto& row : rows) {
    std::vector<std::string> key;
    for (const Node& n : row) key.push_back(rdf::format_node(n));
    keyed.emplace_back(std::move(key), row);
  }
  std::sort(keyed.begin(), keyed.end());
  for (auto& [key, row] : keyed) table.rows.push_back(std::move(row));
  return table;
}

inline BindingTable run_query(std::string_view text, const Graph& g) {
  return evaluate_query(parse_query(text, g.prefixes()), g);
}

inline std::string format_table(const BindingTable& table) {
  std::ostringstream out;
  csv::write_row(out, table.header);
  for (const auto& row : table.rows) {
    csv::Row cells;
    for (const Node& n : row) cells.push_back(cell_text(n));
    csv::write_row(out, cells);
  }
  return out.str();
}

}  // namespace crowdkb::query
