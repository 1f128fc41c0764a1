#include "crowdkb/moderation.hpp"

#include <random>

#include <gtest/gtest.h>

#include "../support/moderation_oracle.hpp"

namespace crowdkb {
namespace {

ExportRow row(Category c, std::string term, std::int64_t up, std::int64_t down,
              std::string creator = "alice", std::string item = "item1") {
  return {std::move(item), c, std::move(term), up, down, std::move(creator)};
}

std::vector<std::string> ids(const std::vector<MergedTag>& tags) {
  std::vector<std::string> out;
  for (const auto& t : tags) out.push_back(t.term_id);
  return out;
}

TEST(ModerationTest, AnnotationScore) {
  Annotation a;
  a.upvotes = 5;
  a.downvotes = 1;
  EXPECT_EQ(annotation_score(a), 4);
  a.upvotes = 0;
  a.downvotes = 0;
  EXPECT_EQ(annotation_score(a), 0);
  a.downvotes = 3;
  EXPECT_EQ(annotation_score(a), -3);
}

TEST(ModerationTest, GenreTopTwoAboveThreshold) {
  auto m = moderate_item({row(Category::Genre, "rock", 5, 1),
                          row(Category::Genre, "pop", 3, 0),
                          row(Category::Genre, "jazz", 2, 1)},
                         ModerationPolicy{});
  EXPECT_EQ(ids(m.kept[Category::Genre]), (std::vector<std::string>{"rock", "pop"}));
  EXPECT_EQ(ids(m.dropped[Category::Genre]), (std::vector<std::string>{"jazz"}));
}

TEST(ModerationTest, InstrumentThresholdIsStrict) {
  auto dropped = moderate_item({row(Category::Instrument, "drums", 6, 1)},
                               ModerationPolicy{});
  EXPECT_TRUE(dropped.kept[Category::Instrument].empty());
  auto kept = moderate_item({row(Category::Instrument, "drums", 7, 1)},
                            ModerationPolicy{});
  EXPECT_EQ(ids(kept.kept[Category::Instrument]), (std::vector<std::string>{"drums"}));
}

TEST(ModerationTest, InstrumentsHaveNoTopKCap) {
  auto m = moderate_item({row(Category::Instrument, "drums", 9, 0),
                          row(Category::Instrument, "bass", 8, 0),
                          row(Category::Instrument, "piano", 7, 0)},
                         ModerationPolicy{});
  EXPECT_EQ(m.kept[Category::Instrument].size(), 3u);
}

TEST(ModerationTest, EmotionTopTwoCap) {
  auto m = moderate_item({row(Category::Emotion, "sadness", 2, 0),
                          row(Category::Emotion, "joy", 4, 0),
                          row(Category::Emotion, "calmness", 3, 0)},
                         ModerationPolicy{});
  EXPECT_EQ(ids(m.kept[Category::Emotion]),
            (std::vector<std::string>{"joy", "calmness"}));
}

TEST(ModerationTest, TiesBreakOnUpvotesThenTermId) {
  auto m = moderate_item({row(Category::Genre, "rock", 4, 2),
                          row(Category::Genre, "pop", 3, 1),
                          row(Category::Genre, "jazz", 2, 0),
                          row(Category::Genre, "funk", 2, 0)},
                         ModerationPolicy{});
  // All score 2; rock has the most upvotes, then pop; funk/jazz tie fully.
  EXPECT_EQ(ids(m.kept[Category::Genre]), (std::vector<std::string>{"rock", "pop"}));
  auto n = moderate_item({row(Category::Genre, "jazz", 2, 0),
                          row(Category::Genre, "funk", 2, 0),
                          row(Category::Genre, "rock", 2, 0)},
                         ModerationPolicy{});
  EXPECT_EQ(ids(n.kept[Category::Genre]), (std::vector<std::string>{"funk", "jazz"}));
}

TEST(ModerationTest, SameTermFromDifferentCreatorsIsMerged) {
  auto m = moderate_item({row(Category::Genre, "rock", 1, 0, "alice"),
                          row(Category::Genre, "rock", 1, 0, "bob"),
                          row(Category::Instrument, "drums", 3, 0, "alice"),
                          row(Category::Instrument, "drums", 3, 0, "bob")},
                         ModerationPolicy{});
  ASSERT_EQ(m.kept[Category::Genre].size(), 1u);
  EXPECT_EQ(m.kept[Category::Genre][0], (MergedTag{"rock", 2, 0}));
  EXPECT_EQ(m.kept[Category::Instrument][0], (MergedTag{"drums", 6, 0}));
}

TEST(ModerationTest, RejectsMixedItemsAndBadPolicy) {
  EXPECT_THROW(moderate_item({row(Category::Genre, "rock", 1, 0, "a", "x"),
                              row(Category::Genre, "pop", 1, 0, "a", "y")},
                             ModerationPolicy{}),
               Error);
  ModerationPolicy bad;
  bad.top_k_emotion_genre = -1;
  EXPECT_THROW(moderate_item({}, bad), Error);
}

TEST(ModerationTest, MatchesBruteForceOracle) {
  std::mt19937_64 rng(500);
  Vocabularies vocab = builtin_vocabularies();
  for (int i = 0; i < 500; ++i) {
    auto rows = testing::random_item_rows(rng, vocab, "item" + std::to_string(i));
    auto m = moderate_item(rows, ModerationPolicy{});
    testing::KeptSet got;
    for (const auto& [c, tags] : m.kept) {
      for (const auto& t : tags) got.insert({c, t.term_id});
    }
    EXPECT_EQ(got, testing::oracle_moderate(rows)) << "case " << i;
  }
}

TEST(ModerationTest, AddingAnUpvoteNeverDropsAKeptTag) {
  std::mt19937_64 rng(77);
  Vocabularies vocab = builtin_vocabularies();
  for (int i = 0; i < 300; ++i) {
    auto rows = testing::random_item_rows(rng, vocab, "item");
    if (rows.empty()) continue;
    auto before = moderate_item(rows, ModerationPolicy{});
    for (const auto& [c, tags] : before.kept) {
      for (const MergedTag& t : tags) {
        auto bumped = rows;
        for (auto& r : bumped) {
          if (r.category == c && r.term_id == t.term_id) {
            ++r.upvotes;
            break;
          }
        }
        auto after = moderate_item(bumped, ModerationPolicy{});
        auto kept = ids(after.kept[c]);
        EXPECT_NE(std::find(kept.begin(), kept.end(), t.term_id), kept.end());
      }
    }
  }
}

std::vector<TrackRecord> records_for(std::initializer_list<std::string> item_ids) {
  std::vector<TrackRecord> out;
  for (const auto& id : item_ids) {
    TrackRecord r;
    r.europeana_id = id;
    out.push_back(r);
  }
  return out;
}

TEST(ModerateCampaignTest, EnrichesRecordsAndCounts) {
  CampaignExport e;
  e.rows = {row(Category::Genre, "rock", 5, 1, "a", "item1"),
            row(Category::Genre, "pop", 3, 0, "a", "item1"),
            row(Category::Genre, "jazz", 2, 1, "a", "item1"),
            row(Category::Instrument, "drums", 7, 1, "b", "item2"),
            row(Category::Emotion, "joy", 1, 0, "b", "item2")};
  e.comments = {{"item2", "c", text::Timestamp{}, "lovely"},
                {"item2", "d", text::Timestamp{}, "bad audio"}};
  auto result = moderate_campaign(e, ModerationPolicy{}, records_for({"item1", "item2", "item3"}));
  EXPECT_EQ(result.records[0].genres, (std::set<std::string>{"pop", "rock"}));
  EXPECT_EQ(result.records[1].instruments, (std::set<std::string>{"drums"}));
  EXPECT_TRUE(result.records[1].emotions.empty());
  EXPECT_EQ(result.records[1].comments,
            (std::vector<std::string>{"lovely", "bad audio"}));
  EXPECT_EQ(result.records[2], records_for({"item3"})[0]);
  EXPECT_EQ(result.report.tags[Category::Genre], (CategoryCount{2, 1}));
  EXPECT_EQ(result.report.tags[Category::Emotion], (CategoryCount{0, 1}));
  EXPECT_EQ(result.report.tags[Category::Instrument], (CategoryCount{1, 0}));
  EXPECT_EQ(result.report.comments, (CategoryCount{2, 0}));
  EXPECT_EQ(result.report.total_kept(), 5u);
  EXPECT_EQ(format_report(result.report),
            "category,kept,dropped,kept_fraction\n"
            "Genre,2,1,0.6667\n"
            "Emotion,0,1,0.0000\n"
            "Instrument,1,0,1.0000\n"
            "Comment,2,0,1.0000\n");
}

TEST(ModerateCampaignTest, EmptyExport) {
  auto result = moderate_campaign({}, ModerationPolicy{}, records_for({"a"}));
  EXPECT_EQ(result.records, records_for({"a"}));
  EXPECT_EQ(result.report.total_kept(), 0u);
  for (const auto& [c, count] : result.report.tags) EXPECT_EQ(count, CategoryCount{});
}

TEST(ModerateCampaignTest, UnknownItemInExport) {
  CampaignExport e;
  e.rows = {row(Category::Genre, "rock", 5, 1, "a", "ghost")};
  try {
    moderate_campaign(e, ModerationPolicy{}, records_for({"item1"}));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::UnknownItemInExport);
  }
  CampaignExport c;
  c.comments = {{"ghost", "x", text::Timestamp{}, "hi"}};
  EXPECT_THROW(moderate_campaign(c, ModerationPolicy{}, records_for({"item1"})), Error);
}

TEST(ModerateCampaignTest, DeterministicAndThresholdsHold) {
  std::mt19937_64 rng(9);
  Vocabularies vocab = builtin_vocabularies();
  CampaignExport e;
  std::vector<TrackRecord> records;
  for (int i = 0; i < 200; ++i) {
    std::string item = "item" + std::to_string(i);
    auto rows = testing::random_item_rows(rng, vocab, item);
    e.rows.insert(e.rows.end(), rows.begin(), rows.end());
    records.push_back(records_for({item})[0]);
  }
  sort_export(e);
  auto a = moderate_campaign(e, ModerationPolicy{}, records);
  auto b = moderate_campaign(e, ModerationPolicy{}, records);
  EXPECT_EQ(format_dataset(a.records, vocab), format_dataset(b.records, vocab));

  std::map<std::pair<std::string, std::string>, std::int64_t> score;
  for (const auto& r : e.rows) score[{r.item_id, r.term_id}] += r.upvotes - r.downvotes;
  for (const auto& rec : a.records) {
    EXPECT_LE(rec.genres.size(), 2u);
    EXPECT_LE(rec.emotions.size(), 2u);
    for (const auto& g : rec.genres) EXPECT_GE((score[{rec.europeana_id, g}]), 2);
    for (const auto& g : rec.emotions) EXPECT_GE((score[{rec.europeana_id, g}]), 2);
    for (const auto& g : rec.instruments) EXPECT_GE((score[{rec.europeana_id, g}]), 6);
  }
}

}  // namespace
}  // namespace crowdkb
