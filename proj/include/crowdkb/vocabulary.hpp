#pragma once

// Controlled term lists for the three enrichment categories, plus the
// valence/arousal placement of the emotion terms.

#include <array>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crowdkb/csv.hpp"
#include "crowdkb/error.hpp"
#include "crowdkb/io.hpp"
#include "crowdkb/namespaces.hpp"
#include "crowdkb/text.hpp"

namespace crowdkb {

enum class Category { Emotion, Genre, Instrument };

inline constexpr std::array kAllCategories = {Category::Genre, Category::Emotion,
                                              Category::Instrument};

constexpr std::string_view category_name(Category c) {
  switch (c) {
    case Category::Emotion: return "Emotion";
    case Category::Genre: return "Genre";
    case Category::Instrument: return "Instrument";
  }
  return "";
}

inline std::optional<Category> parse_category(std::string_view s) {
  s = text::trim(s);
  for (Category c : kAllCategories) {
    if (text::iequals(s, category_name(c))) return c;
  }
  if (text::iequals(s, "Instruments")) return Category::Instrument;
  return std::nullopt;
}

struct Term {
  std::string id;     // stable slug, unique across all categories
  std::string label;  // display text
  Category category = Category::Genre;
  std::string uri;    // external concept URI

  friend bool operator==(const Term&, const Term&) = default;
};

struct EmotionPosition {
  std::string term_id;
  double valence = 0.0;  // horizontal axis
  double arousal = 0.0;  // vertical axis
};

class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(Category category) : category_(category) {}

  Category category() const { return category_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  void add(Term term) { terms_.push_back(std::move(term)); }

  Term* find_id(std::string_view id) {
    for (Term& t : terms_) {
      if (t.id == id) return &t;
    }
    return nullptr;
  }
  const Term* find_id(std::string_view id) const {
    return const_cast<Vocabulary*>(this)->find_id(id);
  }

  // Case-insensitive match against id or label.
  std::vector<const Term*> matches(std::string_view key) const {
    std::vector<const Term*> out;
    for (const Term& t : terms_) {
      if (text::iequals(t.id, key) || text::iequals(t.label, key)) {
        out.push_back(&t);
      }
    }
    return out;
  }

 private:
  Category category_ = Category::Genre;
  std::vector<Term> terms_;
};

class Vocabularies {
 public:
  Vocabularies()
      : emotion_(Category::Emotion),
        genre_(Category::Genre),
        instrument_(Category::Instrument) {}

  const Vocabulary& of(Category c) const {
    switch (c) {
      case Category::Emotion: return emotion_;
      case Category::Genre: return genre_;
      case Category::Instrument: return instrument_;
    }
    return genre_;
  }
  Vocabulary& of(Category c) {
    return const_cast<Vocabulary&>(std::as_const(*this).of(c));
  }

  const Term& resolve_term(std::string_view label_or_id,
                           Category category) const {
    std::string_view key = text::trim(label_or_id);
    auto found = of(category).matches(key);
    if (found.empty()) {
      throw Error(ErrorCode::UnknownTerm,
                  "no " + std::string(category_name(category)) +
                      " term matches '" + std::string(key) + "'");
    }
    if (found.size() > 1) {
      throw Error(ErrorCode::AmbiguousTerm,
                  "'" + std::string(key) + "' matches several " +
                      std::string(category_name(category)) + " terms");
    }
    return *found.front();
  }

  // Lookup by exact id across all categories.
  const Term* find_id(std::string_view id) const {
    for (Category c : kAllCategories) {
      if (const Term* t = of(c).find_id(id)) return t;
    }
    return nullptr;
  }

  const EmotionPosition& emotion_position(const Term& term) const {
    if (term.category != Category::Emotion) {
      throw Error(ErrorCode::NotAnEmotion,
                  "'" + term.id + "' is a " +
                      std::string(category_name(term.category)) + " term");
    }
    auto it = positions_.find(term.id);
    if (it == positions_.end()) {
      throw Error(ErrorCode::UnknownTerm, "no position for '" + term.id + "'");
    }
    return it->second;
  }

  const std::map<std::string, EmotionPosition>& positions() const {
    return positions_;
  }

  void set_position(EmotionPosition p) {
    std::string id = p.term_id;
    positions_[id] = std::move(p);
  }

 private:
  Vocabulary emotion_;
  Vocabulary genre_;
  Vocabulary instrument_;
  std::map<std::string, EmotionPosition> positions_;
};

namespace detail {

inline std::string camel_case(std::string_view label) {
  std::string out;
  bool upper = true;
  for (char c : label) {
    bool alnum = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                 (c >= '0' && c <= '9');
    if (!alnum) {
      upper = true;
      continue;
    }
    out.push_back(upper && c >= 'a' && c <= 'z'
                      ? static_cast<char>(c - 'a' + 'A')
                      : c);
    upper = false;
  }
  return out;
}

inline Term make_term(Category category, std::string_view label) {
  return Term{text::slugify(label), std::string(label), category,
              std::string(ns::kOntology) + camel_case(label)};
}

}  // namespace detail

// Emotion terms in counterclockwise order starting at positive valence, one
// every 45 degrees on the unit circle.
inline constexpr std::array<std::string_view, 8> kCircumplexOrder = {
    "Pleasure", "Joy",     "Arousal", "Fear",
    "Anxiety",  "Sadness", "Boredom", "Calmness"};

inline Vocabularies builtin_vocabularies() {
  Vocabularies v;
  for (std::string_view label :
       {"Arousal", "Joy", "Pleasure", "Calmness", "Boredom", "Sadness",
        "Anxiety", "Fear"}) {
    v.of(Category::Emotion).add(detail::make_term(Category::Emotion, label));
  }
  for (std::string_view label :
       {"Pop", "Rock", "Country", "Classical", "Opera", "Instrumental", "Funk",
        "Hip-hop", "Reggae", "Jazz", "Traditional Folk"}) {
    v.of(Category::Genre).add(detail::make_term(Category::Genre, label));
  }
  for (std::string_view label :
       {"Piano", "Electric Guitar", "Acoustic Guitar", "Drums", "Synthesizer",
        "Violin", "Harmonica", "Banjo", "Bass", "Woodwind", "Brass",
        "Orchestra"}) {
    v.of(Category::Instrument)
        .add(detail::make_term(Category::Instrument, label));
  }

  // Exact values on the axes and at the diagonals; cos/sin would leave 1e-17
  // residue where the figure has a clean zero.
  const double d = std::sqrt(0.5);
  const std::array<std::pair<double, double>, 8> unit = {{
      {1, 0}, {d, d}, {0, 1}, {-d, d}, {-1, 0}, {-d, -d}, {0, -1}, {d, -d},
  }};
  for (std::size_t i = 0; i < kCircumplexOrder.size(); ++i) {
    v.set_position(EmotionPosition{text::slugify(kCircumplexOrder[i]),
                                   unit[i].first, unit[i].second});
  }
  return v;
}

// Override lines: "category,id,label,uri". An existing id gets its label and
// uri replaced; an unseen id adds a Genre or Instrument term. New emotion
// terms are rejected since they would have no circumplex position.
inline void apply_overrides(Vocabularies& vocab, std::string_view contents) {
  for (const csv::Record& rec : csv::read_all(contents)) {
    const csv::Row& row = rec.cells;
    std::string where = "override line " + std::to_string(rec.line);
    if (row.size() == 1 && text::trim(row[0]).empty()) continue;
    if (!row.empty() && text::trim(row[0]).starts_with("#")) continue;
    if (row.size() != 4) {
      throw Error(ErrorCode::MalformedRow, where + ": expected 4 fields");
    }
    if (text::iequals(text::trim(row[0]), "category")) continue;  // header
    auto category = parse_category(row[0]);
    if (!category) {
      throw Error(ErrorCode::InvalidArgument,
                  where + ": unknown category '" + row[0] + "'");
    }
    std::string id(text::trim(row[1]));
    std::string label(text::trim(row[2]));
    std::string uri(text::trim(row[3]));
    if (id.empty() || label.empty()) {
      throw Error(ErrorCode::InvalidArgument, where + ": empty id or label");
    }
    if (!text::is_absolute_uri(uri)) {
      throw Error(ErrorCode::InvalidIri, where + ": '" + uri + "'");
    }
    const Term* existing = vocab.find_id(id);
    if (existing && existing->category != *category) {
      throw Error(ErrorCode::InvalidArgument,
                  where + ": '" + id + "' already belongs to " +
                      std::string(category_name(existing->category)));
    }
    if (existing) {
      Term* t = vocab.of(*category).find_id(id);
      t->label = label;
      t->uri = uri;
    } else if (*category == Category::Emotion) {
      throw Error(ErrorCode::InvalidArgument,
                  where + ": new emotion terms need a circumplex position");
    } else {
      vocab.of(*category).add(Term{id, label, *category, uri});
    }
  }
}

inline Vocabularies load_vocabularies(
    const std::optional<std::filesystem::path>& override_file) {
  Vocabularies v = builtin_vocabularies();
  if (override_file) apply_overrides(v, io::read_file(*override_file));
  return v;
}

}  // namespace crowdkb
