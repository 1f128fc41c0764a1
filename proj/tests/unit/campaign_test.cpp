#include "crowdkb/campaign.hpp"
#include "crowdkb/campaign_io.hpp"

#include <filesystem>
#include <map>
#include <random>
#include <thread>

#include <gtest/gtest.h>

namespace crowdkb {
namespace {

namespace fs = std::filesystem;
using std::chrono::hours;
using std::chrono::seconds;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

Timestamp t0() { return *text::parse_timestamp("2024-03-01T00:00:00Z"); }

Campaign make_campaign(std::size_t items, std::size_t batches = 8,
                       std::string id = "music") {
  Campaign c;
  c.id = std::move(id);
  c.title = "Music enrichment";
  for (std::size_t i = 0; i < items; ++i) c.item_ids.push_back("item" + std::to_string(i + 1));
  c.batch_count = batches;
  c.start = t0();
  c.end = t0() + hours(24 * 18);
  return c;
}

// A clock the test advances by hand.
struct FakeClock {
  Timestamp now = t0() + hours(1);
  CampaignStore::Clock fn() {
    return [this] { return now; };
  }
};

TEST(PartitionTest, PaperScaleSizes) {
  auto batches = partition_batches(make_campaign(854));
  ASSERT_EQ(batches.size(), 8u);
  std::multiset<std::size_t> sizes;
  for (const auto& b : batches) sizes.insert(b.size());
  EXPECT_EQ(sizes.count(107), 6u);
  EXPECT_EQ(sizes.count(106), 2u);
}

TEST(PartitionTest, SingletonsAndTooFew) {
  auto batches = partition_batches(make_campaign(8));
  ASSERT_EQ(batches.size(), 8u);
  for (const auto& b : batches) EXPECT_EQ(b.size(), 1u);
  EXPECT_EQ(code_of([] { partition_batches(make_campaign(7)); }),
            ErrorCode::TooFewItems);
}

TEST(PartitionTest, TruePartitionForManySizes) {
  for (std::size_t batches = 1; batches <= 9; ++batches) {
    for (std::size_t n = batches; n <= 60; n += 7) {
      Campaign c = make_campaign(n, batches, "c" + std::to_string(n));
      auto parts = partition_batches(c);
      std::vector<std::string> all;
      std::size_t lo = n, hi = 0;
      for (const auto& b : parts) {
        all.insert(all.end(), b.begin(), b.end());
        lo = std::min(lo, b.size());
        hi = std::max(hi, b.size());
      }
      EXPECT_LE(hi - lo, 1u);
      std::sort(all.begin(), all.end());
      std::vector<std::string> expected = c.item_ids;
      std::sort(expected.begin(), expected.end());
      EXPECT_EQ(all, expected);
      EXPECT_EQ(partition_batches(c), parts);
    }
  }
}

TEST(PartitionTest, SeedDependsOnCampaignId) {
  EXPECT_NE(partition_batches(make_campaign(100, 8, "a")),
            partition_batches(make_campaign(100, 8, "b")));
}

class StoreTest : public ::testing::Test {
 protected:
  StoreTest() : store_(builtin_vocabularies(), clock_.fn()) {
    store_.add_campaign(make_campaign(16));
  }
  FakeClock clock_;
  CampaignStore store_;
};

TEST_F(StoreTest, SubmitAnnotation) {
  Annotation a = store_.submit_annotation("item1", "Rock", Category::Genre, "alice");
  EXPECT_EQ(a.term_id, "rock");
  EXPECT_EQ(a.upvotes, 0);
  EXPECT_EQ(a.downvotes, 0);
  EXPECT_EQ(code_of([&] {
              store_.submit_annotation("item1", "rock", Category::Genre, "alice");
            }),
            ErrorCode::DuplicateAnnotation);
  Annotation b = store_.submit_annotation("item1", "Rock", Category::Genre, "bob");
  EXPECT_NE(a.id, b.id);
  EXPECT_EQ(store_.annotations_for("item1").size(), 2u);
}

TEST_F(StoreTest, SubmitAnnotationErrors) {
  EXPECT_EQ(code_of([&] {
              store_.submit_annotation("nope", "Rock", Category::Genre, "alice");
            }),
            ErrorCode::UnknownItem);
  EXPECT_EQ(code_of([&] {
              store_.submit_annotation("item1", "Polka", Category::Genre, "alice");
            }),
            ErrorCode::UnknownTerm);
  clock_.now = t0() + hours(24 * 19);
  EXPECT_EQ(code_of([&] {
              store_.submit_annotation("item1", "Rock", Category::Genre, "alice");
            }),
            ErrorCode::CampaignClosed);
  clock_.now = t0() - seconds(1);
  EXPECT_EQ(code_of([&] {
              store_.submit_annotation("item1", "Rock", Category::Genre, "alice");
            }),
            ErrorCode::CampaignClosed);
}

TEST_F(StoreTest, VoteReplacementAndSelfVote) {
  Annotation a = store_.submit_annotation("item1", "Rock", Category::Genre, "alice");
  EXPECT_EQ(store_.cast_vote(a.id, "bob", VoteDirection::Up), (Tally{1, 0}));
  EXPECT_EQ(store_.cast_vote(a.id, "bob", VoteDirection::Down), (Tally{0, 1}));
  EXPECT_EQ(store_.cast_vote(a.id, "bob", VoteDirection::Down), (Tally{0, 1}));
  EXPECT_EQ(store_.vote_of(a.id, "bob"), VoteDirection::Down);
  EXPECT_EQ(code_of([&] { store_.cast_vote(a.id, "alice", VoteDirection::Up); }),
            ErrorCode::SelfVote);
  EXPECT_EQ(code_of([&] { store_.cast_vote("a999", "bob", VoteDirection::Up); }),
            ErrorCode::UnknownAnnotation);
  clock_.now = t0() + hours(24 * 30);
  EXPECT_EQ(code_of([&] { store_.cast_vote(a.id, "carol", VoteDirection::Up); }),
            ErrorCode::CampaignClosed);
}

TEST_F(StoreTest, Comments) {
  Comment c = store_.add_comment("item1", "alice", "sounds like a funeral march");
  EXPECT_EQ(c.text, "sounds like a funeral march");
  ASSERT_EQ(store_.comments_for("item1").size(), 1u);
  EXPECT_EQ(store_.comments_for("item1")[0], c);
  EXPECT_EQ(code_of([&] { store_.add_comment("item1", "alice", " \t\n "); }),
            ErrorCode::EmptyComment);
  EXPECT_EQ(code_of([&] { store_.add_comment("ghost", "alice", "hi"); }),
            ErrorCode::UnknownItem);
  EXPECT_EQ(code_of([&] {
              store_.add_comment("item1", "alice", std::string(2001, 'x'));
            }),
            ErrorCode::CommentTooLong);
  EXPECT_NO_THROW(store_.add_comment("item1", "alice", std::string(2000, 'x')));
}

TEST_F(StoreTest, LeaderboardScoring) {
  EXPECT_TRUE(store_.leaderboard("music").empty());
  std::vector<std::string> ids;
  for (const char* g : {"Rock", "Pop", "Jazz"}) {
    ids.push_back(store_.submit_annotation("item1", g, Category::Genre, "alice").id);
  }
  store_.cast_vote(ids[0], "bob", VoteDirection::Up);
  store_.cast_vote(ids[0], "carol", VoteDirection::Up);
  store_.cast_vote(ids[1], "bob", VoteDirection::Up);
  store_.cast_vote(ids[1], "carol", VoteDirection::Down);
  store_.cast_vote(ids[2], "dave", VoteDirection::Up);
  auto board = store_.leaderboard("music");
  ASSERT_EQ(board.size(), 4u);
  EXPECT_EQ(board[0], (LeaderboardEntry{"alice", 6}));
  // bob, carol and dave all have 0 points; first contribution decides.
  EXPECT_EQ(board[1].user, "bob");
  EXPECT_EQ(board[2].user, "carol");
  EXPECT_EQ(board[3].user, "dave");
}

TEST_F(StoreTest, LeaderboardTieBrokenByEarliestContributor) {
  store_.submit_annotation("item2", "Joy", Category::Emotion, "zed");
  store_.submit_annotation("item2", "Joy", Category::Emotion, "amy");
  auto board = store_.leaderboard("music");
  ASSERT_EQ(board.size(), 2u);
  EXPECT_EQ(board[0].user, "zed");
  EXPECT_EQ(board[0].points, board[1].points);
}

TEST_F(StoreTest, ExportSnapshot) {
  EXPECT_TRUE(store_.export_annotations("music").rows.empty());
  EXPECT_TRUE(store_.export_annotations("music").comments.empty());
  auto a = store_.submit_annotation("item2", "Drums", Category::Instrument, "bob");
  store_.submit_annotation("item1", "Joy", Category::Emotion, "alice");
  store_.cast_vote(a.id, "alice", VoteDirection::Up);
  store_.add_comment("item1", "carol", "nice");
  CampaignExport e = store_.export_annotations("music");
  ASSERT_EQ(e.rows.size(), 2u);
  EXPECT_EQ(e.rows[0], (ExportRow{"item1", Category::Emotion, "joy", 0, 0, "alice"}));
  EXPECT_EQ(e.rows[1],
            (ExportRow{"item2", Category::Instrument, "drums", 1, 0, "bob"}));
  ASSERT_EQ(e.comments.size(), 1u);
  EXPECT_EQ(e.comments[0].text, "nice");
  EXPECT_EQ(code_of([&] { store_.export_annotations("other"); }),
            ErrorCode::UnknownCampaign);
}

TEST_F(StoreTest, BatchLookup) {
  EXPECT_EQ(store_.batch("music", 1).size(), 2u);
  EXPECT_EQ(code_of([&] { store_.batch("music", 0); }), ErrorCode::NotFound);
  EXPECT_EQ(code_of([&] { store_.batch("music", 9); }), ErrorCode::NotFound);
}

TEST(CampaignValidationTest, RejectsBadCampaigns) {
  CampaignStore store(builtin_vocabularies());
  Campaign backwards = make_campaign(10);
  backwards.end = backwards.start;
  EXPECT_EQ(code_of([&] { store.add_campaign(backwards); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { store.add_campaign(make_campaign(3)); }),
            ErrorCode::TooFewItems);
  store.add_campaign(make_campaign(10));
  EXPECT_EQ(code_of([&] { store.add_campaign(make_campaign(10)); }),
            ErrorCode::DuplicateCampaign);
  EXPECT_EQ(code_of([&] { store.add_campaign(make_campaign(10, 8, "other")); }),
            ErrorCode::InvalidArgument);
}

// Random interleavings of votes: tallies always equal the live votes and each
// call moves leaderboard points by exactly its own effect.
TEST(StorePropertyTest, TallyConsistencyAndLeaderboardDeltas) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> users = {"u1", "u2", "u3", "u4", "u5"};
  for (int round = 0; round < 20; ++round) {
    FakeClock clock;
    CampaignStore store(builtin_vocabularies(), clock.fn());
    store.add_campaign(make_campaign(8));
    const auto& genres = store.vocabularies().of(Category::Genre).terms();
    std::vector<Annotation> anns;
    std::map<std::pair<std::string, std::string>, VoteDirection> live;
    auto points = [&] {
      std::map<std::string, std::int64_t> out;
      for (const auto& e : store.leaderboard("music")) out[e.user] = e.points;
      return out;
    };
    for (int step = 0; step < 200; ++step) {
      auto before = points();
      const std::string& user = users[rng() % users.size()];
      std::map<std::string, std::int64_t> delta;
      if (anns.empty() || rng() % 4 == 0) {
        std::string item = "item" + std::to_string(1 + rng() % 8);
        const Term& t = genres[rng() % genres.size()];
        try {
          anns.push_back(store.submit_annotation(item, t.id, Category::Genre, user));
          delta[user] = 1;
        } catch (const Error& e) {
          ASSERT_EQ(e.code(), ErrorCode::DuplicateAnnotation);
        }
      } else {
        const Annotation& a = anns[rng() % anns.size()];
        VoteDirection d = rng() % 3 ? VoteDirection::Up : VoteDirection::Down;
        try {
          store.cast_vote(a.id, user, d);
          auto key = std::make_pair(a.id, user);
          auto prev = live.find(key);
          std::int64_t change = d == VoteDirection::Up ? 1 : -1;
          if (prev != live.end()) change -= prev->second == VoteDirection::Up ? 1 : -1;
          live[key] = d;
          delta[a.creator] = change;
        } catch (const Error& e) {
          ASSERT_EQ(e.code(), ErrorCode::SelfVote);
        }
      }
      auto after = points();
      for (const auto& [u, p] : after) {
        std::int64_t was = before.count(u) ? before[u] : 0;
        ASSERT_EQ(p - was, delta.count(u) ? delta[u] : 0) << "user " << u;
      }
    }
    for (const Annotation& a : anns) {
      std::int64_t up = 0, down = 0;
      for (const auto& [key, d] : live) {
        if (key.first != a.id) continue;
        (d == VoteDirection::Up ? up : down)++;
      }
      auto current = store.annotation(a.id);
      ASSERT_TRUE(current);
      EXPECT_EQ(current->upvotes, up);
      EXPECT_EQ(current->downvotes, down);
    }
  }
}

TEST(StoreConcurrencyTest, ParallelVotersKeepTalliesExact) {
  CampaignStore store(builtin_vocabularies(),
                      [] { return t0() + hours(2); });
  store.add_campaign(make_campaign(8));
  Annotation a = store.submit_annotation("item1", "Jazz", Category::Genre, "owner");
  constexpr int kThreads = 8;
  constexpr int kVotersPerThread = 200;
  std::vector<std::thread> threads;
  for (int t = 0; t < kThreads; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < kVotersPerThread; ++i) {
        std::string voter = "v" + std::to_string(t) + "_" + std::to_string(i);
        store.cast_vote(a.id, voter, VoteDirection::Down);
        store.cast_vote(a.id, voter, i % 2 ? VoteDirection::Up : VoteDirection::Down);
        if (i % 10 == 0) store.export_annotations("music");
      }
    });
  }
  for (auto& th : threads) th.join();
  auto final = store.annotation(a.id);
  EXPECT_EQ(final->upvotes, kThreads * kVotersPerThread / 2);
  EXPECT_EQ(final->downvotes, kThreads * kVotersPerThread / 2);
}

class CampaignIoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("crowdkb_campaign_io_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

void populate(CampaignStore& store, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Vocabularies& v = store.vocabularies();
  std::vector<std::string> users = {"alice", "bob", "carol", "dave"};
  std::vector<Annotation> anns;
  for (int i = 0; i < 150; ++i) {
    std::string item = "item" + std::to_string(1 + rng() % 16);
    const std::string& user = users[rng() % users.size()];
    Category c = kAllCategories[rng() % 3];
    const Term& t = v.of(c).terms()[rng() % v.of(c).size()];
    try {
      switch (rng() % 3) {
        case 0: anns.push_back(store.submit_annotation(item, t.id, c, user)); break;
        case 1:
          if (!anns.empty()) {
            store.cast_vote(anns[rng() % anns.size()].id, user,
                            rng() % 2 ? VoteDirection::Up : VoteDirection::Down);
          }
          break;
        default: store.add_comment(item, user, "comment, with \"quotes\"\n" + std::to_string(i));
      }
    } catch (const Error&) {
    }
  }
}

TEST_F(CampaignIoTest, ExportFilesRoundTrip) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    FakeClock clock;
    CampaignStore store(builtin_vocabularies(), clock.fn());
    store.add_campaign(make_campaign(16));
    populate(store, seed);
    CampaignExport e = store.export_annotations("music");
    fs::path out = dir_ / std::to_string(seed);
    write_export(e, out);
    EXPECT_EQ(read_export(out), e);
  }
}

TEST_F(CampaignIoTest, EventLogReplayReproducesStore) {
  fs::path log = dir_ / "store.log";
  CampaignExport original;
  std::vector<LeaderboardEntry> board;
  {
    FakeClock clock;
    PersistentStore persistent(log, builtin_vocabularies(), clock.fn());
    persistent.store().add_campaign(make_campaign(16));
    populate(persistent.store(), 5);
    original = persistent.store().export_annotations("music");
    board = persistent.store().leaderboard("music");
  }
  FakeClock clock;
  PersistentStore reopened(log, builtin_vocabularies(), clock.fn());
  EXPECT_EQ(reopened.store().export_annotations("music"), original);
  EXPECT_EQ(reopened.store().leaderboard("music"), board);
  // New ids continue after the replayed ones.
  Annotation a = reopened.store().submit_annotation("item1", "Opera", Category::Genre,
                                                    "newcomer");
  EXPECT_TRUE(reopened.store().annotation(a.id));
}

TEST_F(CampaignIoTest, CorruptLogIsReported) {
  fs::path log = dir_ / "bad.log";
  io::write_file(log, "{\"op\":\"campaign\"\n");
  EXPECT_EQ(code_of([&] { PersistentStore s(log, builtin_vocabularies()); }),
            ErrorCode::CorruptStore);
  io::write_file(log, "{\"op\":\"vote\",\"annotation_id\":\"a1\",\"user\":\"x\","
                      "\"direction\":\"up\",\"at\":\"2024-03-01T00:00:00Z\"}\n");
  EXPECT_EQ(code_of([&] { PersistentStore s(log, builtin_vocabularies()); }),
            ErrorCode::CorruptStore);
}

}  // namespace
}  // namespace crowdkb
