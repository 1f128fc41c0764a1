#pragma once

// Synthetic annotators for exercising a campaign end to end. Every item gets
// a planted ground truth (genres, with emotions and instruments correlated to
// them); annotators visit items of their batch, tag what they perceive,
// upvote matching tags others already added, vote on the rest according to
// their own judgement and occasionally leave a comment.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "crowdkb/campaign.hpp"
#include "crowdkb/error.hpp"
#include "crowdkb/vocabulary.hpp"

namespace crowdkb {

struct AnnotatorBehavior {
  double accuracy = 0.85;            // chance a perceived tag is a true one
  double recall = 0.55;              // chance each true tag is noticed on a visit
  double vote_agreement = 0.9;       // chance a vote reflects the truth
  double vote_probability = 0.6;     // chance of voting on each other tag seen
  double comment_probability = 0.105;
  std::size_t items_per_annotator = 80;
  std::int64_t seconds_per_action = 20;

  void validate() const {
    for (double p : {accuracy, recall, vote_agreement, vote_probability,
                     comment_probability}) {
      if (!(p >= 0 && p <= 1)) {
        throw Error(ErrorCode::InvalidArgument, "behavior probabilities must be in [0, 1]");
      }
    }
    if (items_per_annotator == 0 || seconds_per_action < 0) {
      throw Error(ErrorCode::InvalidArgument, "invalid annotator workload");
    }
  }
};

using GroundTruth = std::map<std::string, std::map<Category, std::set<std::string>>>;

struct SimulationReport {
  GroundTruth truth;
  std::vector<std::string> users;
  std::size_t annotations = 0;
  std::size_t votes = 0;
  std::size_t comments = 0;
};

namespace detail {

struct GenreProfile {
  std::string_view genre;
  double weight;
  std::vector<std::pair<std::string_view, double>> instruments;
  std::vector<std::pair<std::string_view, double>> emotions;
};

inline const std::vector<GenreProfile>& genre_profiles() {
  static const std::vector<GenreProfile> profiles = {
      {"rock", 0.17,
       {{"electric-guitar", 0.9}, {"drums", 0.9}, {"bass", 0.6}},
       {{"arousal", 0.7}, {"joy", 0.5}, {"anxiety", 0.15}}},
      {"pop", 0.13,
       {{"drums", 0.8}, {"synthesizer", 0.5}, {"bass", 0.5}, {"piano", 0.3}},
       {{"joy", 0.8}, {"pleasure", 0.4}, {"arousal", 0.3}}},
      {"classical", 0.15,
       {{"orchestra", 0.6}, {"piano", 0.5}, {"violin", 0.5}, {"woodwind", 0.3}},
       {{"calmness", 0.7}, {"pleasure", 0.35}, {"sadness", 0.2}}},
      {"jazz", 0.1,
       {{"piano", 0.6}, {"brass", 0.6}, {"drums", 0.6}, {"bass", 0.6}},
       {{"calmness", 0.55}, {"pleasure", 0.5}, {"joy", 0.3}}},
      {"instrumental", 0.1,
       {{"piano", 0.5}, {"acoustic-guitar", 0.4}, {"orchestra", 0.4}, {"synthesizer", 0.3}},
       {{"calmness", 0.7}, {"boredom", 0.2}, {"sadness", 0.2}}},
      {"traditional-folk", 0.08,
       {{"acoustic-guitar", 0.7}, {"violin", 0.5}, {"banjo", 0.3}, {"harmonica", 0.3},
        {"woodwind", 0.2}},
       {{"joy", 0.5}, {"sadness", 0.3}, {"calmness", 0.3}}},
      {"country", 0.06,
       {{"acoustic-guitar", 0.8}, {"banjo", 0.5}, {"harmonica", 0.4}, {"violin", 0.3}},
       {{"joy", 0.5}, {"sadness", 0.4}}},
      {"opera", 0.06,
       {{"orchestra", 0.9}, {"violin", 0.4}},
       {{"sadness", 0.4}, {"arousal", 0.4}, {"fear", 0.15}}},
      {"funk", 0.05,
       {{"bass", 0.9}, {"drums", 0.9}, {"brass", 0.5}, {"electric-guitar", 0.5}},
       {{"joy", 0.7}, {"arousal", 0.6}}},
      {"hip-hop", 0.05,
       {{"drums", 0.9}, {"synthesizer", 0.7}, {"bass", 0.6}},
       {{"arousal", 0.6}, {"anxiety", 0.3}, {"joy", 0.3}}},
      {"reggae", 0.05,
       {{"drums", 0.8}, {"bass", 0.8}, {"electric-guitar", 0.5}, {"brass", 0.3}},
       {{"joy", 0.6}, {"calmness", 0.4}}},
  };
  return profiles;
}

inline bool chance(std::mt19937_64& rng, double p) {
  return std::uniform_real_distribution<double>(0, 1)(rng) < p;
}

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(rng() % v.size())];
}

inline std::map<Category, std::set<std::string>> plant_truth(std::mt19937_64& rng) {
  const auto& profiles = genre_profiles();
  std::vector<double> weights;
  for (const auto& p : profiles) weights.push_back(p.weight);
  std::discrete_distribution<std::size_t> genre_dist(weights.begin(), weights.end());

  std::map<Category, std::set<std::string>> truth;
  std::vector<const GenreProfile*> chosen = {&profiles[genre_dist(rng)]};
  if (chance(rng, 0.35)) {
    const GenreProfile* second = &profiles[genre_dist(rng)];
    if (second != chosen[0]) chosen.push_back(second);
  }
  for (const GenreProfile* g : chosen) {
    truth[Category::Genre].insert(std::string(g->genre));
    for (const auto& [id, p] : g->instruments) {
      if (chance(rng, p)) truth[Category::Instrument].insert(std::string(id));
    }
    for (const auto& [id, p] : g->emotions) {
      if (chance(rng, p)) truth[Category::Emotion].insert(std::string(id));
    }
  }
  if (truth[Category::Instrument].empty()) {
    truth[Category::Instrument].insert(std::string(chosen[0]->instruments[0].first));
  }
  if (truth[Category::Emotion].empty()) {
    truth[Category::Emotion].insert(std::string(chosen[0]->emotions[0].first));
  }
  return truth;
}

inline const std::vector<std::string>& comment_templates() {
  static const std::vector<std::string> t = {
      "Beautiful %s piece, very calm.",
      "Really enjoyed this %s track!",
      "Not sure this is %s at all.",
      "The audio quality is poor, lots of noise.",
      "Lovely melody, reminds me of old %s records.",
      "Boring and repetitive.",
      "Great energy, the rhythm is amazing.",
      "Sad but gorgeous %s.",
      "The recording is cut short at the end.",
      "Hard to tell the instruments apart here.",
      "Wonderful performance, a real classic.",
      "I don't like the vocals on this one.",
  };
  return t;
}

inline std::string comment_text(std::mt19937_64& rng, const std::string& genre_label) {
  std::string t = pick(rng, comment_templates());
  if (auto pos = t.find("%s"); pos != std::string::npos) {
    t.replace(pos, 2, text::to_lower(genre_label));
  }
  return t;
}

}  // namespace detail

// Populates `campaign_id` in `store` with the contributions of n synthetic
// annotators. Annotator i works in batch (i mod batch_count) + 1; visits are
// interleaved round by round. Actions are stamped from the campaign start in
// fixed steps, capped at its end.
inline SimulationReport simulate_annotators(CampaignStore& store,
                                            const std::string& campaign_id,
                                            std::size_t n, std::uint64_t seed,
                                            const AnnotatorBehavior& behavior = {}) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "need at least one annotator");
  behavior.validate();
  const Campaign campaign = store.campaign(campaign_id);
  const Vocabularies& vocab = store.vocabularies();
  std::mt19937_64 rng(seed);
  SimulationReport report;

  for (const std::string& item : campaign.item_ids) {
    report.truth[item] = detail::plant_truth(rng);
  }

  std::size_t width = std::to_string(n).size();
  std::vector<std::vector<std::string>> plans(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string num = std::to_string(i + 1);
    report.users.push_back("annotator" + std::string(width - num.size(), '0') + num);
    std::vector<std::string> items = store.batch(campaign_id, i % campaign.batch_count + 1);
    std::shuffle(items.begin(), items.end(), rng);
    items.resize(std::min(items.size(), behavior.items_per_annotator));
    plans[i] = std::move(items);
  }

  std::int64_t tick = 0;
  auto now = [&] {
    Timestamp t = campaign.start + std::chrono::seconds(tick);
    tick += behavior.seconds_per_action;
    return std::min(t, campaign.end);
  };

  auto perceive = [&](const std::set<std::string>& true_tags, Category c) {
    std::set<std::string> out;
    const auto& terms = vocab.of(c).terms();
    for (const std::string& t : true_tags) {
      if (!detail::chance(rng, behavior.recall)) continue;
      if (detail::chance(rng, behavior.accuracy)) {
        out.insert(t);
      } else {
        const std::string& wrong = detail::pick(rng, terms).id;
        if (!true_tags.count(wrong)) out.insert(wrong);
      }
    }
    return out;
  };

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::size_t rounds = 0;
  for (const auto& p : plans) rounds = std::max(rounds, p.size());

  for (std::size_t round = 0; round < rounds; ++round) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t who : order) {
      if (round >= plans[who].size()) continue;
      const std::string& user = report.users[who];
      const std::string& item = plans[who][round];
      const auto& truth = report.truth.at(item);
      std::vector<Annotation> existing = store.annotations_for(item);

      std::set<std::string> handled;
      for (Category c : kAllCategories) {
        auto it = truth.find(c);
        std::set<std::string> true_tags =
            it == truth.end() ? std::set<std::string>{} : it->second;
        for (const std::string& term : perceive(true_tags, c)) {
          handled.insert(term);
          auto same = std::find_if(existing.begin(), existing.end(),
                                   [&](const Annotation& a) { return a.term_id == term; });
          if (same == existing.end()) {
            store.submit_annotation_at(item, term, c, user, now());
            ++report.annotations;
          } else if (same->creator != user) {
            store.cast_vote_at(same->id, user, VoteDirection::Up, now());
            ++report.votes;
          }
        }
      }

      for (const Annotation& a : existing) {
        if (a.creator == user || handled.count(a.term_id)) continue;
        if (!detail::chance(rng, behavior.vote_probability)) continue;
        auto it = truth.find(a.category);
        bool correct = it != truth.end() && it->second.count(a.term_id) > 0;
        if (!detail::chance(rng, behavior.vote_agreement)) correct = !correct;
        store.cast_vote_at(a.id, user, correct ? VoteDirection::Up : VoteDirection::Down,
                           now());
        ++report.votes;
      }

      if (detail::chance(rng, behavior.comment_probability)) {
        const std::string& genre = *truth.at(Category::Genre).begin();
        const Term* t = vocab.of(Category::Genre).find_id(genre);
        store.add_comment_at(item, user, detail::comment_text(rng, t ? t->label : genre),
                             now());
        ++report.comments;
      }
    }
  }
  return report;
}

}  // namespace crowdkb
