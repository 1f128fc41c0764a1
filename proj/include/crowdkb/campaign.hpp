#pragma once

// Annotation campaigns: batching of items, crowd tags with up/down votes,
// free-text comments, the leaderboard and the raw-contribution export.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

#include "crowdkb/catalog.hpp"
#include "crowdkb/error.hpp"
#include "crowdkb/text.hpp"
#include "crowdkb/vocabulary.hpp"

namespace crowdkb {

using text::Timestamp;

struct Campaign {
  std::string id;
  std::string title;
  std::string instructions;
  std::vector<std::string> item_ids;
  std::size_t batch_count = 8;
  Timestamp start{};
  Timestamp end{};

  friend bool operator==(const Campaign&, const Campaign&) = default;

  bool is_open(Timestamp now) const { return start <= now && now <= end; }
};

inline void validate_campaign(const Campaign& c) {
  if (c.id.empty()) throw Error(ErrorCode::InvalidArgument, "empty campaign id");
  if (c.batch_count == 0) {
    throw Error(ErrorCode::InvalidArgument, "batch_count must be positive");
  }
  if (c.end <= c.start) {
    throw Error(ErrorCode::InvalidArgument, "campaign must end after it starts");
  }
  if (c.item_ids.size() < c.batch_count) {
    throw Error(ErrorCode::TooFewItems,
                std::to_string(c.item_ids.size()) + " items for " +
                    std::to_string(c.batch_count) + " batches");
  }
  std::set<std::string> unique(c.item_ids.begin(), c.item_ids.end());
  if (unique.size() != c.item_ids.size()) {
    throw Error(ErrorCode::InvalidArgument, "duplicate item ids in campaign");
  }
}

// Seeded Fisher-Yates keyed on the campaign id, then contiguous slices whose
// sizes differ by at most one (the larger slices come first).
inline std::vector<std::vector<std::string>> partition_batches(
    const Campaign& c) {
  if (c.batch_count == 0) {
    throw Error(ErrorCode::InvalidArgument, "batch_count must be positive");
  }
  if (c.item_ids.size() < c.batch_count) {
    throw Error(ErrorCode::TooFewItems,
                std::to_string(c.item_ids.size()) + " items for " +
                    std::to_string(c.batch_count) + " batches");
  }
  std::vector<std::string> items = c.item_ids;
  std::mt19937_64 rng(text::fnv1a(c.id));
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(items[i - 1], items[j]);
  }
  std::size_t base = items.size() / c.batch_count;
  std::size_t extra = items.size() % c.batch_count;
  std::vector<std::vector<std::string>> batches;
  std::size_t pos = 0;
  for (std::size_t b = 0; b < c.batch_count; ++b) {
    std::size_t len = base + (b < extra ? 1 : 0);
    batches.emplace_back(items.begin() + static_cast<std::ptrdiff_t>(pos),
                         items.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
  }
  return batches;
}

enum class VoteDirection { Up, Down };

inline std::string_view direction_name(VoteDirection d) {
  return d == VoteDirection::Up ? "up" : "down";
}

inline std::optional<VoteDirection> parse_direction(std::string_view s) {
  s = text::trim(s);
  if (text::iequals(s, "up")) return VoteDirection::Up;
  if (text::iequals(s, "down")) return VoteDirection::Down;
  return std::nullopt;
}

struct Annotation {
  std::string id;
  std::string item_id;
  std::string term_id;
  Category category = Category::Genre;
  std::string creator;
  Timestamp created_at{};
  std::int64_t upvotes = 0;
  std::int64_t downvotes = 0;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct Vote {
  std::string annotation_id;
  std::string voter;
  VoteDirection direction = VoteDirection::Up;
  Timestamp cast_at{};
};

struct Tally {
  std::int64_t upvotes = 0;
  std::int64_t downvotes = 0;
  friend bool operator==(const Tally&, const Tally&) = default;
};

inline constexpr std::size_t kMaxCommentLength = 2000;

struct Comment {
  std::string id;
  std::string item_id;
  std::string author;
  std::string text;
  Timestamp created_at{};

  friend bool operator==(const Comment&, const Comment&) = default;
};

struct LeaderboardEntry {
  std::string user;
  std::int64_t points = 0;
  friend bool operator==(const LeaderboardEntry&,
                         const LeaderboardEntry&) = default;
};

// One exported tag row.
struct ExportRow {
  std::string item_id;
  Category category = Category::Genre;
  std::string term_id;
  std::int64_t upvotes = 0;
  std::int64_t downvotes = 0;
  std::string creator;

  friend bool operator==(const ExportRow&, const ExportRow&) = default;
};

struct CommentRow {
  std::string item_id;
  std::string author;
  Timestamp created_at{};
  std::string text;

  friend bool operator==(const CommentRow&, const CommentRow&) = default;
};

struct CampaignExport {
  std::vector<ExportRow> rows;
  std::vector<CommentRow> comments;

  friend bool operator==(const CampaignExport&, const CampaignExport&) = default;
};

// Canonical export order: item, category, term, creator.
inline void sort_export(CampaignExport& e) {
  std::sort(e.rows.begin(), e.rows.end(),
            [](const ExportRow& a, const ExportRow& b) {
              return std::make_tuple(std::cref(a.item_id),
                                     category_name(a.category),
                                     std::cref(a.term_id), std::cref(a.creator)) <
                     std::make_tuple(std::cref(b.item_id),
                                     category_name(b.category),
                                     std::cref(b.term_id), std::cref(b.creator));
            });
  std::stable_sort(e.comments.begin(), e.comments.end(),
                   [](const CommentRow& a, const CommentRow& b) {
                     return std::tie(a.item_id, a.created_at, a.author, a.text) <
                            std::tie(b.item_id, b.created_at, b.author, b.text);
                   });
}

// Receives every successful mutation, in linearization order. The store
// calls it while holding its write lock.
class StoreObserver {
 public:
  virtual ~StoreObserver() = default;
  virtual void on_campaign(const Campaign&, const std::vector<TrackRecord>&) = 0;
  virtual void on_annotation(const Annotation&) = 0;
  virtual void on_vote(const Vote&) = 0;
  virtual void on_comment(const Comment&) = 0;
};

// Thread-safe campaign store. All mutations serialize on one writer lock,
// which makes every per-annotation tally update linearizable and lets
// export_annotations read a consistent snapshot.
class CampaignStore {
 public:
  using Clock = std::function<Timestamp()>;

  static Timestamp system_now() {
    return std::chrono::floor<std::chrono::seconds>(
        std::chrono::system_clock::now());
  }

  explicit CampaignStore(Vocabularies vocab, Clock clock = &system_now)
      : vocab_(std::move(vocab)), clock_(std::move(clock)) {}

  CampaignStore(const CampaignStore&) = delete;
  CampaignStore& operator=(const CampaignStore&) = delete;

  const Vocabularies& vocabularies() const { return vocab_; }

  void set_observer(StoreObserver* observer) {
    std::unique_lock lock(mu_);
    observer_ = observer;
  }

  // `records` optionally carries metadata for the campaign's items.
  void add_campaign(const Campaign& campaign,
                    const std::vector<TrackRecord>& records = {}) {
    validate_campaign(campaign);
    std::unique_lock lock(mu_);
    if (campaigns_.count(campaign.id)) {
      throw Error(ErrorCode::DuplicateCampaign, campaign.id);
    }
    for (const std::string& item : campaign.item_ids) {
      if (item_campaign_.count(item)) {
        throw Error(ErrorCode::InvalidArgument,
                    "item " + item + " already belongs to campaign " +
                        item_campaign_[item]);
      }
    }
    std::set<std::string> items(campaign.item_ids.begin(),
                                campaign.item_ids.end());
    for (const TrackRecord& r : records) {
      if (!items.count(r.europeana_id)) {
        throw Error(ErrorCode::UnknownItem,
                    r.europeana_id + " is not part of campaign " + campaign.id);
      }
    }
    CampaignState state;
    state.campaign = campaign;
    state.batches = partition_batches(campaign);
    campaigns_.emplace(campaign.id, std::move(state));
    for (const std::string& item : campaign.item_ids) {
      item_campaign_[item] = campaign.id;
    }
    for (const TrackRecord& r : records) records_[r.europeana_id] = r;
    if (observer_) observer_->on_campaign(campaign, records);
  }

  std::vector<Campaign> campaigns() const {
    std::shared_lock lock(mu_);
    std::vector<Campaign> out;
    for (const auto& [id, state] : campaigns_) out.push_back(state.campaign);
    return out;
  }

  Campaign campaign(const std::string& id) const {
    std::shared_lock lock(mu_);
    return state(id).campaign;
  }

  // 1-based batch index.
  std::vector<std::string> batch(const std::string& campaign_id,
                                 std::size_t index) const {
    std::shared_lock lock(mu_);
    const CampaignState& s = state(campaign_id);
    if (index == 0 || index > s.batches.size()) {
      throw Error(ErrorCode::NotFound,
                  "campaign " + campaign_id + " has no batch " +
                      std::to_string(index));
    }
    return s.batches[index - 1];
  }

  std::optional<TrackRecord> item_record(const std::string& item_id) const {
    std::shared_lock lock(mu_);
    auto it = records_.find(item_id);
    if (it == records_.end()) return std::nullopt;
    return it->second;
  }

  Annotation submit_annotation(const std::string& item_id,
                               std::string_view term, Category category,
                               const std::string& user) {
    return submit_annotation_at(item_id, term, category, user, clock_());
  }

  Annotation submit_annotation_at(const std::string& item_id,
                                  std::string_view term, Category category,
                                  const std::string& user, Timestamp now) {
    require_user(user);
    std::unique_lock lock(mu_);
    CampaignState& s = state_for_item(item_id);
    if (!s.campaign.is_open(now)) {
      throw Error(ErrorCode::CampaignClosed, s.campaign.id);
    }
    const Term& t = vocab_.resolve_term(term, category);
    auto key = std::make_tuple(item_id, t.id, user);
    if (annotation_keys_.count(key)) {
      throw Error(ErrorCode::DuplicateAnnotation,
                  user + " already tagged " + item_id + " with " + t.label);
    }
    Annotation a;
    a.id = "a" + std::to_string(++annotation_seq_);
    a.item_id = item_id;
    a.term_id = t.id;
    a.category = category;
    a.creator = user;
    a.created_at = now;
    annotation_keys_.insert(key);
    item_annotations_[item_id].push_back(a.id);
    annotation_campaign_[a.id] = s.campaign.id;
    touch(s, user);
    auto [it, inserted] = annotations_.emplace(a.id, a);
    if (observer_) observer_->on_annotation(it->second);
    return it->second;
  }

  Tally cast_vote(const std::string& annotation_id, const std::string& voter,
                  VoteDirection direction) {
    return cast_vote_at(annotation_id, voter, direction, clock_());
  }

  Tally cast_vote_at(const std::string& annotation_id, const std::string& voter,
                     VoteDirection direction, Timestamp now) {
    require_user(voter);
    std::unique_lock lock(mu_);
    auto it = annotations_.find(annotation_id);
    if (it == annotations_.end()) {
      throw Error(ErrorCode::UnknownAnnotation, annotation_id);
    }
    Annotation& a = it->second;
    CampaignState& s = campaigns_.at(annotation_campaign_.at(annotation_id));
    if (!s.campaign.is_open(now)) {
      throw Error(ErrorCode::CampaignClosed, s.campaign.id);
    }
    if (a.creator == voter) {
      throw Error(ErrorCode::SelfVote,
                  voter + " cannot vote on their own annotation");
    }
    auto& live = votes_[annotation_id];
    auto prev = live.find(voter);
    if (prev != live.end()) {
      if (prev->second.direction == VoteDirection::Up) --a.upvotes;
      else --a.downvotes;
    }
    Vote v{annotation_id, voter, direction, now};
    live[voter] = v;
    if (direction == VoteDirection::Up) ++a.upvotes;
    else ++a.downvotes;
    touch(s, voter);
    if (observer_) observer_->on_vote(v);
    return Tally{a.upvotes, a.downvotes};
  }

  Comment add_comment(const std::string& item_id, const std::string& user,
                      std::string_view text) {
    return add_comment_at(item_id, user, text, clock_());
  }

  Comment add_comment_at(const std::string& item_id, const std::string& user,
                         std::string_view body, Timestamp now) {
    require_user(user);
    std::string_view trimmed = text::trim(body);
    std::unique_lock lock(mu_);
    CampaignState& s = state_for_item(item_id);
    if (trimmed.empty()) throw Error(ErrorCode::EmptyComment, item_id);
    if (trimmed.size() > kMaxCommentLength) {
      throw Error(ErrorCode::CommentTooLong,
                  std::to_string(trimmed.size()) + " characters");
    }
    if (!s.campaign.is_open(now)) {
      throw Error(ErrorCode::CampaignClosed, s.campaign.id);
    }
    Comment c{"c" + std::to_string(++comment_seq_), item_id, user,
              std::string(trimmed), now};
    item_comments_[item_id].push_back(c);
    touch(s, user);
    if (observer_) observer_->on_comment(c);
    return c;
  }

  std::optional<Annotation> annotation(const std::string& id) const {
    std::shared_lock lock(mu_);
    auto it = annotations_.find(id);
    if (it == annotations_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<Annotation> annotations_for(const std::string& item_id) const {
    std::shared_lock lock(mu_);
    std::vector<Annotation> out;
    auto it = item_annotations_.find(item_id);
    if (it == item_annotations_.end()) return out;
    for (const std::string& id : it->second) out.push_back(annotations_.at(id));
    return out;
  }

  std::vector<Comment> comments_for(const std::string& item_id) const {
    std::shared_lock lock(mu_);
    auto it = item_comments_.find(item_id);
    return it == item_comments_.end() ? std::vector<Comment>{} : it->second;
  }

  // Direction of `voter`'s live vote on an annotation, if any.
  std::optional<VoteDirection> vote_of(const std::string& annotation_id,
                                       const std::string& voter) const {
    std::shared_lock lock(mu_);
    auto it = votes_.find(annotation_id);
    if (it == votes_.end()) return std::nullopt;
    auto v = it->second.find(voter);
    if (v == it->second.end()) return std::nullopt;
    return v->second.direction;
  }

  // points = annotations created + upvotes received - downvotes received.
  // Every user with any contribution (tag, vote or comment) is listed;
  // equal points are ordered by first contribution.
  std::vector<LeaderboardEntry> leaderboard(const std::string& campaign_id) const {
    std::shared_lock lock(mu_);
    const CampaignState& s = state(campaign_id);
    std::map<std::string, std::int64_t> points;
    for (const auto& [user, seq] : s.first_contribution) points[user] = 0;
    for (const std::string& item : s.campaign.item_ids) {
      auto it = item_annotations_.find(item);
      if (it == item_annotations_.end()) continue;
      for (const std::string& id : it->second) {
        const Annotation& a = annotations_.at(id);
        points[a.creator] += 1 + a.upvotes - a.downvotes;
      }
    }
    std::vector<LeaderboardEntry> out;
    for (const auto& [user, p] : points) out.push_back({user, p});
    std::sort(out.begin(), out.end(),
              [&](const LeaderboardEntry& a, const LeaderboardEntry& b) {
                if (a.points != b.points) return a.points > b.points;
                return s.first_contribution.at(a.user) <
                       s.first_contribution.at(b.user);
              });
    return out;
  }

  CampaignExport export_annotations(const std::string& campaign_id) const {
    std::shared_lock lock(mu_);
    const CampaignState& s = state(campaign_id);
    CampaignExport e;
    for (const std::string& item : s.campaign.item_ids) {
      if (auto it = item_annotations_.find(item); it != item_annotations_.end()) {
        for (const std::string& id : it->second) {
          const Annotation& a = annotations_.at(id);
          e.rows.push_back({a.item_id, a.category, a.term_id, a.upvotes,
                            a.downvotes, a.creator});
        }
      }
      if (auto it = item_comments_.find(item); it != item_comments_.end()) {
        for (const Comment& c : it->second) {
          e.comments.push_back({c.item_id, c.author, c.created_at, c.text});
        }
      }
    }
    sort_export(e);
    return e;
  }

 private:
  struct CampaignState {
    Campaign campaign;
    std::vector<std::vector<std::string>> batches;
    std::map<std::string, std::uint64_t> first_contribution;
  };

  static void require_user(const std::string& user) {
    if (text::trim(user).empty()) {
      throw Error(ErrorCode::InvalidArgument, "empty user id");
    }
  }

  const CampaignState& state(const std::string& id) const {
    auto it = campaigns_.find(id);
    if (it == campaigns_.end()) throw Error(ErrorCode::UnknownCampaign, id);
    return it->second;
  }

  CampaignState& state_for_item(const std::string& item_id) {
    auto it = item_campaign_.find(item_id);
    if (it == item_campaign_.end()) throw Error(ErrorCode::UnknownItem, item_id);
    return campaigns_.at(it->second);
  }

  void touch(CampaignState& s, const std::string& user) {
    s.first_contribution.emplace(user, ++contribution_seq_);
  }

  Vocabularies vocab_;
  Clock clock_;
  StoreObserver* observer_ = nullptr;

  mutable std::shared_mutex mu_;
  std::map<std::string, CampaignState> campaigns_;
  std::map<std::string, std::string> item_campaign_;
  std::map<std::string, TrackRecord> records_;
  std::map<std::string, Annotation> annotations_;
  std::map<std::string, std::string> annotation_campaign_;
  std::map<std::string, std::vector<std::string>> item_annotations_;
  std::set<std::tuple<std::string, std::string, std::string>> annotation_keys_;
  std::map<std::string, std::map<std::string, Vote>> votes_;
  std::map<std::string, std::vector<Comment>> item_comments_;
  std::uint64_t annotation_seq_ = 0;
  std::uint64_t comment_seq_ = 0;
  std::uint64_t contribution_seq_ = 0;
};

}  // namespace crowdkb
