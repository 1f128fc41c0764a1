#pragma once

// Brute-force restatement of the filtering rule, kept deliberately naive:
// "only the two top-ranked annotations per Emotion and Genre were kept and
// only if these had an up- versus down-votes difference of at least two;
// for Instruments only values with a votes difference above five were kept."
// A tag is top-ranked when fewer than two other tags outrank it.

#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "crowdkb/campaign.hpp"
#include "crowdkb/vocabulary.hpp"

namespace crowdkb::testing {

using KeptSet = std::set<std::pair<Category, std::string>>;

inline KeptSet oracle_moderate(const std::vector<ExportRow>& rows) {
  // Sum tallies per (category, term) with a plain scan for each key.
  std::set<std::pair<Category, std::string>> keys;
  for (const ExportRow& r : rows) keys.insert({r.category, r.term_id});
  auto totals = [&](const std::pair<Category, std::string>& key) {
    long up = 0, down = 0;
    for (const ExportRow& r : rows) {
      if (r.category == key.first && r.term_id == key.second) {
        up += r.upvotes;
        down += r.downvotes;
      }
    }
    return std::make_pair(up, down);
  };

  KeptSet kept;
  for (const auto& key : keys) {
    auto [up, down] = totals(key);
    long diff = up - down;
    if (key.first == Category::Instrument) {
      if (diff > 5) kept.insert(key);
      continue;
    }
    int outranked_by = 0;
    for (const auto& other : keys) {
      if (other.first != key.first || other == key) continue;
      auto [oup, odown] = totals(other);
      long odiff = oup - odown;
      bool above = odiff > diff || (odiff == diff && oup > up) ||
                   (odiff == diff && oup == up && other.second < key.second);
      if (above) ++outranked_by;
    }
    if (outranked_by < 2 && diff >= 2) kept.insert(key);
  }
  return kept;
}

// Rows for one item: a handful of terms per category, some tagged by several
// creators, tallies skewed so every rule boundary is hit often.
inline std::vector<ExportRow> random_item_rows(std::mt19937_64& rng,
                                               const Vocabularies& vocab,
                                               const std::string& item) {
  std::vector<ExportRow> rows;
  std::vector<std::string> creators = {"s1", "s2", "s3", "s4"};
  for (Category c : kAllCategories) {
    const auto& terms = vocab.of(c).terms();
    std::size_t n = rng() % 6;
    for (std::size_t i = 0; i < n; ++i) {
      const Term& t = terms[rng() % std::min<std::size_t>(terms.size(), 5)];
      const std::string& creator = creators[rng() % creators.size()];
      bool dup = false;
      for (const ExportRow& r : rows) {
        dup = dup || (r.term_id == t.id && r.creator == creator);
      }
      if (dup) continue;
      rows.push_back({item, c, t.id, static_cast<std::int64_t>(rng() % 9),
                      static_cast<std::int64_t>(rng() % 4), creator});
    }
  }
  return rows;
}

}  // namespace crowdkb::testing
