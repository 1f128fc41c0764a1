#pragma once

// Compiles enriched track records into a triple graph, materializes derived
// classes defined by conjunctive axioms, and links in facts from an external
// resolver.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "crowdkb/catalog.hpp"
#include "crowdkb/csv.hpp"
#include "crowdkb/error.hpp"
#include "crowdkb/io.hpp"
#include "crowdkb/namespaces.hpp"
#include "crowdkb/rdf.hpp"
#include "crowdkb/vocabulary.hpp"

namespace crowdkb::kg {

using rdf::Graph;
using rdf::Iri;
using rdf::Literal;
using rdf::Node;
using rdf::Triple;

inline Iri onto(std::string_view local) {
  return Iri(std::string(ns::kOntology) + std::string(local));
}
inline Iri resource(std::string_view local) {
  return Iri(std::string(ns::kResource) + std::string(local));
}
inline Iri rdf_type() { return Iri(std::string(ns::kRdfType)); }

// Ontology vocabulary emitted by build_graph.
namespace term {
inline constexpr std::string_view kSong = "Song";
inline constexpr std::string_view kComposer = "Composer";
inline constexpr std::string_view kEuropeanaId = "europeanaId";
inline constexpr std::string_view kTitle = "title";
inline constexpr std::string_view kRecordingYear = "recordingYear";
inline constexpr std::string_view kDurationMs = "durationMs";
inline constexpr std::string_view kPublisher = "publisher";
inline constexpr std::string_view kPlace = "place";
inline constexpr std::string_view kAudioUrl = "audioUrl";
inline constexpr std::string_view kHasComposer = "hasComposer";
inline constexpr std::string_view kName = "name";
inline constexpr std::string_view kBirthDate = "birthDate";
inline constexpr std::string_view kBirthYear = "birthYear";
inline constexpr std::string_view kDeathDate = "deathDate";
inline constexpr std::string_view kDeathYear = "deathYear";
inline constexpr std::string_view kBiography = "biography";
inline constexpr std::string_view kHasGenre = "hasGenre";
inline constexpr std::string_view kHasEmotion = "hasEmotion";
inline constexpr std::string_view kHasInstrument = "hasInstrument";
inline constexpr std::string_view kHasComment = "hasComment";
inline constexpr std::string_view kSource = "source";
}  // namespace term

inline std::set<Iri> ontology_properties() {
  std::set<Iri> out = {rdf_type()};
  for (std::string_view p :
       {term::kEuropeanaId, term::kTitle, term::kRecordingYear,
        term::kDurationMs, term::kPublisher, term::kPlace, term::kAudioUrl,
        term::kHasComposer, term::kName, term::kBirthDate, term::kBirthYear,
        term::kDeathDate, term::kDeathYear, term::kBiography, term::kHasGenre,
        term::kHasEmotion, term::kHasInstrument, term::kHasComment,
        term::kSource}) {
    out.insert(onto(p));
  }
  return out;
}

inline Iri tag_predicate(Category c) {
  switch (c) {
    case Category::Emotion: return onto(term::kHasEmotion);
    case Category::Genre: return onto(term::kHasGenre);
    case Category::Instrument: return onto(term::kHasInstrument);
  }
  return onto(term::kHasGenre);
}

inline Iri track_iri(std::string_view europeana_id) {
  return resource("track/" + text::percent_encode(europeana_id));
}

inline Iri composer_iri(std::string_view name) {
  std::string slug = text::slugify(name);
  if (slug.empty()) slug = "_" + text::percent_encode(name);
  return resource("composer/" + slug);
}

inline Graph build_graph(const std::vector<TrackRecord>& records,
                         const Vocabularies& vocab) {
  Graph g;
  std::set<std::string> seen;
  const Iri type = rdf_type();
  for (const TrackRecord& r : records) {
    if (!seen.insert(r.europeana_id).second) {
      throw Error(ErrorCode::DuplicateTrackId, r.europeana_id);
    }
    Iri track = track_iri(r.europeana_id);
    auto lit = [&](std::string_view pred, Literal value) {
      g.insert(track, onto(pred), std::move(value));
    };
    g.insert(track, type, onto(term::kSong));
    lit(term::kEuropeanaId, Literal::string(r.europeana_id));
    if (r.title) lit(term::kTitle, Literal::string(*r.title));
    if (r.year) lit(term::kRecordingYear, Literal::year(*r.year));
    if (r.duration_ms) lit(term::kDurationMs, Literal::integer(*r.duration_ms));
    if (r.publisher) lit(term::kPublisher, Literal::string(*r.publisher));
    if (r.place) lit(term::kPlace, Literal::string(*r.place));
    if (r.audio_url) lit(term::kAudioUrl, Literal::string(*r.audio_url));

    if (r.composer) {
      Iri composer = composer_iri(*r.composer);
      g.insert(track, onto(term::kHasComposer), composer);
      g.insert(composer, type, onto(term::kComposer));
      g.insert(composer, onto(term::kName), Literal::string(*r.composer));
      if (r.composer_birth) {
        g.insert(composer, onto(term::kBirthDate),
                 Literal::string(r.composer_birth->to_string()));
        g.insert(composer, onto(term::kBirthYear),
                 Literal::year(r.composer_birth->year));
      }
      if (r.composer_death) {
        g.insert(composer, onto(term::kDeathDate),
                 Literal::string(r.composer_death->to_string()));
        g.insert(composer, onto(term::kDeathYear),
                 Literal::year(r.composer_death->year));
      }
      if (r.biography) {
        g.insert(composer, onto(term::kBiography), Literal::string(*r.biography));
      }
    }

    for (Category c : kAllCategories) {
      for (const std::string& id : r.tags(c)) {
        const Term* t = vocab.of(c).find_id(id);
        if (!t) {
          throw Error(ErrorCode::UnknownTerm,
                      "'" + id + "' on " + r.europeana_id + " is not a " +
                          std::string(category_name(c)) + " term");
        }
        g.insert(track, tag_predicate(c), Iri(t->uri));
      }
    }
    for (const std::string& comment : r.comments) {
      lit(term::kHasComment, Literal::string(comment));
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Derived classes

struct HasValue {
  Iri predicate;
  Iri object;
};

// Inclusive bounds on an Integer or Year literal.
struct YearRange {
  Iri predicate;
  std::int64_t min_year = 0;
  std::int64_t max_year = 0;
};

using Condition = std::variant<HasValue, YearRange>;

struct ClassAxiom {
  Iri class_iri;
  std::vector<Condition> conjuncts;
};

inline ClassAxiom calm_jazz_song(const Vocabularies& vocab) {
  return ClassAxiom{
      onto("CalmJazzSong"),
      {HasValue{onto(term::kHasGenre),
                Iri(vocab.resolve_term("Jazz", Category::Genre).uri)},
       HasValue{onto(term::kHasEmotion),
                Iri(vocab.resolve_term("Calmness", Category::Emotion).uri)}}};
}

inline ClassAxiom nineteenth_century_composer(std::int64_t first_year = 1801,
                                              std::int64_t last_year = 1900) {
  return ClassAxiom{onto("NineteenthCenturyComposer"),
                    {YearRange{onto(term::kBirthYear), first_year, last_year}}};
}

inline std::vector<ClassAxiom> default_axioms(const Vocabularies& vocab) {
  return {calm_jazz_song(vocab), nineteenth_century_composer()};
}

namespace detail {

inline const Iri& condition_predicate(const Condition& c) {
  return std::visit([](const auto& v) -> const Iri& { return v.predicate; }, c);
}

inline bool satisfies(const Graph& g, const Iri& entity, const Condition& c) {
  if (const HasValue* hv = std::get_if<HasValue>(&c)) {
    return g.contains(Triple{entity, hv->predicate, Node{hv->object}});
  }
  const YearRange& yr = std::get<YearRange>(c);
  for (const Node& n : g.objects(entity, yr.predicate)) {
    const Literal* lit = std::get_if<Literal>(&n);
    if (!lit) continue;
    auto v = lit->number();
    if (v && *v >= yr.min_year && *v <= yr.max_year) return true;
  }
  return false;
}

}  // namespace detail

inline void validate_axioms(const Graph& g, const std::vector<ClassAxiom>& axioms) {
  std::set<Iri> known = ontology_properties();
  for (const Iri& p : g.predicates()) known.insert(p);
  for (const ClassAxiom& a : axioms) {
    if (a.conjuncts.empty()) {
      throw Error(ErrorCode::InvalidArgument,
                  "axiom for " + a.class_iri.value() + " has no conditions");
    }
    if (known.count(a.class_iri)) {
      throw Error(ErrorCode::InvalidArgument,
                  a.class_iri.value() + " is used as a predicate");
    }
    for (const Condition& c : a.conjuncts) {
      const Iri& p = detail::condition_predicate(c);
      if (!known.count(p)) throw Error(ErrorCode::UnknownPredicate, p.value());
      if (const YearRange* yr = std::get_if<YearRange>(&c);
          yr && yr->min_year > yr->max_year) {
        throw Error(ErrorCode::InvalidArgument, "empty year range");
      }
    }
  }
}

// Adds (entity, rdf:type, class) for every entity meeting all conjuncts.
// Runs to a fixpoint so axioms may build on each other's classes.
inline Graph materialize_axioms(Graph g, const std::vector<ClassAxiom>& axioms) {
  validate_axioms(g, axioms);
  const Iri type = rdf_type();
  for (bool changed = true; changed;) {
    changed = false;
    for (const ClassAxiom& a : axioms) {
      const Iri& first = detail::condition_predicate(a.conjuncts.front());
      std::set<Iri> candidates;
      for (const Triple& t : g.triples()) {
        if (t.predicate == first) candidates.insert(t.subject);
      }
      std::vector<Iri> members;
      for (const Iri& e : candidates) {
        bool all = true;
        for (const Condition& c : a.conjuncts) {
          if (!detail::satisfies(g, e, c)) {
            all = false;
            break;
          }
        }
        if (all) members.push_back(e);
      }
      for (const Iri& e : members) changed |= g.insert(e, type, a.class_iri);
    }
  }
  return g;
}

inline std::set<Iri> members_of(const Graph& g, const Iri& class_iri) {
  std::set<Iri> out;
  const Iri type = rdf_type();
  for (const Triple& t : g.triples()) {
    if (t.predicate == type && t.object == Node{class_iri}) out.insert(t.subject);
  }
  return out;
}

// ---------------------------------------------------------------------------
// External facts

struct Fact {
  Iri predicate;
  Node object;
};

class FactResolver {
 public:
  virtual ~FactResolver() = default;
  // nullopt when the entity is unknown to the resolver.
  virtual std::optional<std::vector<Fact>> resolve(const Iri& entity) const = 0;
  // Recorded as the provenance of every fact this resolver contributes.
  virtual Iri source() const = 0;
};

// Offline resolver backed by "entity_iri,predicate_iri,object" lines. An
// object written as <...> or as a bare absolute URI is an IRI; anything else
// is a string literal.
class FixtureResolver : public FactResolver {
 public:
  FixtureResolver(std::string_view contents, Iri source)
      : source_(std::move(source)) {
    for (const csv::Record& rec : csv::read_all(contents)) {
      const csv::Row& row = rec.cells;
      if (!row.empty() && text::trim(row[0]).starts_with("#")) continue;
      if (row.size() != 3) {
        throw Error(ErrorCode::MalformedRow,
                    "fixture line " + std::to_string(rec.line) +
                        ": expected 3 fields");
      }
      std::string entity(text::trim(row[0]));
      if (entity == "entity_iri") continue;  // header
      std::string_view obj = text::trim(row[2]);
      Node object = Node{Literal::string(std::string(obj))};
      if (obj.size() >= 2 && obj.front() == '<' && obj.back() == '>') {
        object = Iri(std::string(obj.substr(1, obj.size() - 2)));
      } else if (text::is_absolute_uri(obj)) {
        object = Iri(std::string(obj));
      }
      facts_[Iri(entity)].push_back(
          Fact{Iri(std::string(text::trim(row[1]))), std::move(object)});
    }
  }

  static FixtureResolver from_file(const std::filesystem::path& path) {
    return FixtureResolver(io::read_file(path),
                           Iri("file:" + text::percent_encode(
                                             path.filename().string())));
  }

  std::optional<std::vector<Fact>> resolve(const Iri& entity) const override {
    auto it = facts_.find(entity);
    if (it == facts_.end()) return std::nullopt;
    return it->second;
  }

  Iri source() const override { return source_; }

 private:
  Iri source_;
  std::map<Iri, std::vector<Fact>> facts_;
};

struct IntegrationResult {
  Graph graph;
  std::size_t facts_added = 0;
  std::vector<std::string> report;  // one line per skipped entity
};

inline Iri statement_iri(const Triple& t) {
  return resource("fact/" + text::hex64(text::fnv1a(rdf::format_triple(t))));
}

// Each added fact is also reified as an rdf:Statement carrying kb:source.
inline IntegrationResult integrate_external(Graph g, const FactResolver& resolver,
                                            const std::vector<Iri>& entities) {
  IntegrationResult out;
  std::set<Iri> present;
  for (const Triple& t : g.triples()) {
    present.insert(t.subject);
    if (const Iri* o = std::get_if<Iri>(&t.object)) present.insert(*o);
  }
  const Iri type = rdf_type();
  const Iri statement(std::string(ns::kRdf) + "Statement");
  const Iri source = resolver.source();
  for (const Iri& e : entities) {
    if (!present.count(e)) {
      out.report.push_back(e.value() + ": not in graph");
      continue;
    }
    auto facts = resolver.resolve(e);
    if (!facts) {
      out.report.push_back(e.value() + ": unresolved");
      continue;
    }
    for (const Fact& f : *facts) {
      Triple t{e, f.predicate, f.object};
      if (!g.insert(t)) continue;
      ++out.facts_added;
      Iri st = statement_iri(t);
      g.insert(st, type, statement);
      g.insert(st, Iri(std::string(ns::kRdf) + "subject"), t.subject);
      g.insert(st, Iri(std::string(ns::kRdf) + "predicate"), t.predicate);
      g.insert(st, Iri(std::string(ns::kRdf) + "object"), t.object);
      g.insert(st, onto(term::kSource), source);
    }
  }
  out.graph = std::move(g);
  return out;
}

}  // namespace crowdkb::kg
