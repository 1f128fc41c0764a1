#pragma once

// Post-campaign filtering of crowd tags by vote difference.
//
// Emotion and Genre: per item, keep at most the top-k tags (default 2) and
// only those whose up-minus-down difference is at least min_diff (default 2).
// Instrument: keep every tag whose difference is strictly above the
// exclusive threshold (default 5), without a top-k cap.
//
// Annotations of the same term on the same item by different creators are
// merged (tallies summed) before ranking. Ranking is score descending, then
// upvotes descending, then term id ascending. Comments are never filtered.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "crowdkb/campaign.hpp"
#include "crowdkb/catalog.hpp"
#include "crowdkb/error.hpp"

namespace crowdkb {

struct ModerationPolicy {
  int top_k_emotion_genre = 2;
  int min_diff_emotion_genre = 2;
  int min_diff_instruments_exclusive = 5;

  void validate() const {
    if (top_k_emotion_genre < 0 || min_diff_emotion_genre < 0 ||
        min_diff_instruments_exclusive < 0) {
      throw Error(ErrorCode::InvalidArgument,
                  "moderation parameters must be non-negative");
    }
  }
};

inline std::int64_t annotation_score(const Annotation& a) {
  return a.upvotes - a.downvotes;
}
inline std::int64_t annotation_score(const ExportRow& r) {
  return r.upvotes - r.downvotes;
}

struct MergedTag {
  std::string term_id;
  std::int64_t upvotes = 0;
  std::int64_t downvotes = 0;

  std::int64_t score() const { return upvotes - downvotes; }
  friend bool operator==(const MergedTag&, const MergedTag&) = default;
};

struct ItemModeration {
  std::map<Category, std::vector<MergedTag>> kept;     // in rank order
  std::map<Category, std::vector<MergedTag>> dropped;  // in rank order
};

inline bool ranks_before(const MergedTag& a, const MergedTag& b) {
  if (a.score() != b.score()) return a.score() > b.score();
  if (a.upvotes != b.upvotes) return a.upvotes > b.upvotes;
  return a.term_id < b.term_id;
}

inline ItemModeration moderate_item(const std::vector<ExportRow>& rows,
                                    const ModerationPolicy& policy) {
  policy.validate();
  ItemModeration out;
  if (rows.empty()) return out;
  std::map<Category, std::map<std::string, MergedTag>> merged;
  for (const ExportRow& r : rows) {
    if (r.item_id != rows.front().item_id) {
      throw Error(ErrorCode::InvalidArgument,
                  "moderate_item got rows for " + rows.front().item_id +
                      " and " + r.item_id);
    }
    if (r.upvotes < 0 || r.downvotes < 0) {
      throw Error(ErrorCode::InvalidArgument, "negative tally on " + r.item_id);
    }
    MergedTag& m = merged[r.category][r.term_id];
    m.term_id = r.term_id;
    m.upvotes += r.upvotes;
    m.downvotes += r.downvotes;
  }
  for (auto& [category, by_term] : merged) {
    std::vector<MergedTag> ranked;
    for (auto& [term, tag] : by_term) ranked.push_back(tag);
    std::sort(ranked.begin(), ranked.end(), ranks_before);
    auto& kept = out.kept[category];
    auto& dropped = out.dropped[category];
    for (const MergedTag& tag : ranked) {
      bool keep;
      if (category == Category::Instrument) {
        keep = tag.score() > policy.min_diff_instruments_exclusive;
      } else {
        keep = static_cast<int>(kept.size()) < policy.top_k_emotion_genre &&
               tag.score() >= policy.min_diff_emotion_genre;
      }
      (keep ? kept : dropped).push_back(tag);
    }
  }
  return out;
}

struct CategoryCount {
  std::size_t kept = 0;
  std::size_t dropped = 0;

  double kept_fraction() const {
    std::size_t total = kept + dropped;
    return total == 0 ? 0.0 : static_cast<double>(kept) / static_cast<double>(total);
  }
  friend bool operator==(const CategoryCount&, const CategoryCount&) = default;
};

// Counts are of merged (item, term) tags, plus comments.
struct ModerationReport {
  std::map<Category, CategoryCount> tags;
  CategoryCount comments;

  std::size_t total_kept() const {
    std::size_t n = comments.kept;
    for (const auto& [c, count] : tags) n += count.kept;
    return n;
  }
};

struct ModerationResult {
  std::vector<TrackRecord> records;
  ModerationReport report;
};

inline ModerationResult moderate_campaign(const CampaignExport& e,
                                          const ModerationPolicy& policy,
                                          std::vector<TrackRecord> records) {
  policy.validate();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < records.size(); ++i) {
    index[records[i].europeana_id] = i;
  }
  auto lookup = [&](const std::string& item) -> TrackRecord& {
    auto it = index.find(item);
    if (it == index.end()) throw Error(ErrorCode::UnknownItemInExport, item);
    return records[it->second];
  };

  std::map<std::string, std::vector<ExportRow>> by_item;
  for (const ExportRow& r : e.rows) {
    lookup(r.item_id);
    by_item[r.item_id].push_back(r);
  }
  for (const CommentRow& c : e.comments) lookup(c.item_id);

  ModerationResult result;
  for (Category c : kAllCategories) result.report.tags[c];
  for (const auto& [item, rows] : by_item) {
    ItemModeration m = moderate_item(rows, policy);
    TrackRecord& rec = lookup(item);
    for (const auto& [category, kept] : m.kept) {
      for (const MergedTag& tag : kept) rec.tags(category).insert(tag.term_id);
      result.report.tags[category].kept += kept.size();
    }
    for (const auto& [category, dropped] : m.dropped) {
      result.report.tags[category].dropped += dropped.size();
    }
  }
  for (const CommentRow& c : e.comments) {
    lookup(c.item_id).comments.push_back(c.text);
    ++result.report.comments.kept;
  }
  result.records = std::move(records);
  return result;
}

inline std::string format_report(const ModerationReport& report) {
  std::ostringstream os;
  os << "category,kept,dropped,kept_fraction\n";
  auto line = [&](std::string_view name, const CategoryCount& c) {
    char frac[32];
    std::snprintf(frac, sizeof frac, "%.4f", c.kept_fraction());
    os << name << ',' << c.kept << ',' << c.dropped << ',' << frac << '\n';
  };
  for (Category c : kAllCategories) {
    auto it = report.tags.find(c);
    line(category_name(c), it == report.tags.end() ? CategoryCount{} : it->second);
  }
  line("Comment", report.comments);
  return os.str();
}

}  // namespace crowdkb
