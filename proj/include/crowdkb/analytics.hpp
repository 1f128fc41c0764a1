#pragma once

// Pair mining over merged tag sets and tag-overlap recommendation.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "crowdkb/catalog.hpp"
#include "crowdkb/csv.hpp"
#include "crowdkb/error.hpp"
#include "crowdkb/vocabulary.hpp"

namespace crowdkb {

struct TagTransaction {
  std::string item_id;
  std::set<std::string> tags;  // genre, emotion and instrument ids together
  friend bool operator==(const TagTransaction&, const TagTransaction&) = default;
};

inline std::vector<TagTransaction> transactions_from(
    const std::vector<TrackRecord>& records) {
  std::vector<TagTransaction> out;
  out.reserve(records.size());
  for (const TrackRecord& r : records) {
    TagTransaction t{r.europeana_id, {}};
    for (Category c : kAllCategories) t.tags.insert(r.tags(c).begin(), r.tags(c).end());
    out.push_back(std::move(t));
  }
  return out;
}

inline double pair_support(const std::vector<TagTransaction>& transactions,
                           const std::string& a, const std::string& b) {
  if (transactions.empty()) throw Error(ErrorCode::EmptyTransactionSet, "");
  std::size_t both = 0;
  for (const TagTransaction& t : transactions) {
    if (t.tags.count(a) && t.tags.count(b)) ++both;
  }
  return static_cast<double>(both) / static_cast<double>(transactions.size());
}

struct TagPair {
  std::string first;  // first < second
  std::string second;
  double support = 0;
  friend bool operator==(const TagPair&, const TagPair&) = default;
};

// Supports are compared as counts, so a threshold of 0.13 over 100
// transactions admits exactly the pairs seen 13 or more times.
inline std::size_t min_count(double min_support, std::size_t n) {
  return static_cast<std::size_t>(
      std::ceil(min_support * static_cast<double>(n) - 1e-9));
}

inline std::vector<TagPair> frequent_pairs(
    const std::vector<TagTransaction>& transactions, double min_support) {
  if (transactions.empty()) throw Error(ErrorCode::EmptyTransactionSet, "");
  if (!(min_support > 0 && min_support <= 1)) {
    throw Error(ErrorCode::InvalidArgument, "min_support must be in (0, 1]");
  }
  const std::size_t n = transactions.size();
  const std::size_t need = std::max<std::size_t>(1, min_count(min_support, n));

  std::map<std::string, std::size_t> singles;
  for (const TagTransaction& t : transactions) {
    for (const std::string& tag : t.tags) ++singles[tag];
  }
  std::set<std::string> frequent;
  for (const auto& [tag, count] : singles) {
    if (count >= need) frequent.insert(tag);
  }

  std::map<std::pair<std::string, std::string>, std::size_t> pairs;
  for (const TagTransaction& t : transactions) {
    std::vector<const std::string*> kept;
    for (const std::string& tag : t.tags) {
      if (frequent.count(tag)) kept.push_back(&tag);
    }
    for (std::size_t i = 0; i < kept.size(); ++i) {
      for (std::size_t j = i + 1; j < kept.size(); ++j) ++pairs[{*kept[i], *kept[j]}];
    }
  }

  std::vector<TagPair> out;
  for (const auto& [key, count] : pairs) {
    if (count < need) continue;
    out.push_back({key.first, key.second,
                   static_cast<double>(count) / static_cast<double>(n)});
  }
  std::stable_sort(out.begin(), out.end(), [](const TagPair& a, const TagPair& b) {
    return a.support > b.support;
  });
  return out;
}

inline std::string term_label(const Vocabularies& vocab, const std::string& id) {
  for (Category c : kAllCategories) {
    if (const Term* t = vocab.of(c).find_id(id)) return t->label;
  }
  return id;
}

// "support,pair" with three-decimal supports and labels joined by ", ".
inline std::string format_support_report(const std::vector<TagPair>& pairs,
                                         const Vocabularies& vocab) {
  std::ostringstream out;
  csv::write_row(out, {"support", "pair"});
  for (const TagPair& p : pairs) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", p.support);
    csv::write_row(out, {buf, term_label(vocab, p.first) + ", " +
                                  term_label(vocab, p.second)});
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Similarity and recommendation

struct SimilarityWeights {
  double genre = 0.4;
  double emotion = 0.3;
  double instrument = 0.3;

  void validate() const {
    if (genre < 0 || emotion < 0 || instrument < 0) {
      throw Error(ErrorCode::InvalidArgument, "similarity weights must be non-negative");
    }
    if (std::abs(genre + emotion + instrument - 1.0) > 1e-9) {
      throw Error(ErrorCode::InvalidArgument, "similarity weights must sum to 1");
    }
  }

  double of(Category c) const {
    switch (c) {
      case Category::Genre: return genre;
      case Category::Emotion: return emotion;
      case Category::Instrument: return instrument;
    }
    return 0;
  }
};

inline double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0;
  std::size_t common = 0;
  for (const std::string& x : a) common += b.count(x);
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

inline double similarity(const TrackRecord& a, const TrackRecord& b,
                         const SimilarityWeights& w = {}) {
  w.validate();
  double s = 0;
  for (Category c : kAllCategories) s += w.of(c) * jaccard(a.tags(c), b.tags(c));
  return s;
}

struct Recommendation {
  TrackRecord record;
  double score = 0;
};

inline std::vector<Recommendation> recommend(const TrackRecord& seed,
                                             const std::vector<TrackRecord>& corpus,
                                             std::size_t k,
                                             const SimilarityWeights& w = {}) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "");
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  w.validate();
  std::vector<std::pair<double, const TrackRecord*>> scored;
  for (const TrackRecord& r : corpus) {
    if (r.europeana_id == seed.europeana_id) continue;
    scored.emplace_back(similarity(seed, r, w), &r);
  }
  auto better = [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second->europeana_id < y.second->europeana_id;
  };
  std::size_t take = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                    scored.end(), better);
  std::vector<Recommendation> out;
  for (std::size_t i = 0; i < take; ++i) {
    out.push_back({*scored[i].second, scored[i].first});
  }
  return out;
}

}  // namespace crowdkb
