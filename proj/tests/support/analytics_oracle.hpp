#pragma once

// Exhaustive restatements of pair support mining and recommendation ranking.

#include <algorithm>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "crowdkb/analytics.hpp"

namespace crowdkb::testing {

inline std::vector<std::string> twelve_tags() {
  return {"t00", "t01", "t02", "t03", "t04", "t05",
          "t06", "t07", "t08", "t09", "t10", "t11"};
}

inline std::vector<TagTransaction> random_transactions(std::mt19937_64& rng,
                                                      std::size_t max_size = 60) {
  std::vector<std::string> tags = twelve_tags();
  std::vector<TagTransaction> out(1 + rng() % max_size);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].item_id = "i" + std::to_string(i);
    // Skewed inclusion so some pairs are common and others rare.
    for (std::size_t k = 0; k < tags.size(); ++k) {
      if (rng() % 12 < 12 - k) out[i].tags.insert(tags[k]);
    }
  }
  return out;
}

// min_support given in hundredths so the threshold test is exact.
inline std::vector<TagPair> oracle_pairs(const std::vector<TagTransaction>& ts,
                                         int min_support_percent) {
  std::vector<std::string> all = twelve_tags();
  std::vector<std::tuple<long, std::string, std::string>> hits;
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      long count = 0;
      for (const auto& t : ts) {
        if (t.tags.count(all[i]) && t.tags.count(all[j])) ++count;
      }
      if (count > 0 && count * 100 >= min_support_percent * static_cast<long>(ts.size())) {
        hits.emplace_back(-count, all[i], all[j]);
      }
    }
  }
  std::sort(hits.begin(), hits.end());
  std::vector<TagPair> out;
  for (const auto& [neg, a, b] : hits) {
    out.push_back({a, b, static_cast<double>(-neg) / static_cast<double>(ts.size())});
  }
  return out;
}

}  // namespace crowdkb::testing
