#include "crowdkb/vocabulary.hpp"

#include <cmath>
#include <set>

#include <gtest/gtest.h>

namespace crowdkb {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

TEST(VocabularyTest, BuiltinSizes) {
  Vocabularies v = builtin_vocabularies();
  EXPECT_EQ(v.of(Category::Emotion).size(), 8u);
  EXPECT_EQ(v.of(Category::Genre).size(), 11u);
  EXPECT_EQ(v.of(Category::Instrument).size(), 12u);
}

TEST(VocabularyTest, IdsUniqueAcrossCategories) {
  Vocabularies v = builtin_vocabularies();
  std::set<std::string> ids;
  std::size_t total = 0;
  for (Category c : kAllCategories) {
    for (const Term& t : v.of(c).terms()) {
      ids.insert(t.id);
      ++total;
      EXPECT_FALSE(t.label.empty());
      EXPECT_EQ(t.category, c);
      EXPECT_TRUE(text::is_absolute_uri(t.uri)) << t.uri;
    }
  }
  EXPECT_EQ(ids.size(), total);
}

TEST(VocabularyTest, ResolveTermCaseInsensitive) {
  Vocabularies v = builtin_vocabularies();
  EXPECT_EQ(v.resolve_term("rock", Category::Genre).label, "Rock");
  EXPECT_EQ(v.resolve_term("Calmness", Category::Emotion).id, "calmness");
  EXPECT_EQ(v.resolve_term("ELECTRIC guitar", Category::Instrument).id,
            "electric-guitar");
  EXPECT_EQ(v.resolve_term("hip-hop", Category::Genre).label, "Hip-hop");
}

TEST(VocabularyTest, ResolveTermErrors) {
  Vocabularies v = builtin_vocabularies();
  EXPECT_EQ(code_of([&] { v.resolve_term("Trumpet", Category::Instrument); }),
            ErrorCode::UnknownTerm);
  // Right label, wrong category.
  EXPECT_EQ(code_of([&] { v.resolve_term("Rock", Category::Emotion); }),
            ErrorCode::UnknownTerm);
}

TEST(VocabularyTest, LabelResolvesToItselfAndNothingIsAmbiguous) {
  Vocabularies v = builtin_vocabularies();
  for (Category c : kAllCategories) {
    for (const Term& t : v.of(c).terms()) {
      EXPECT_EQ(v.resolve_term(t.label, c), t);
      EXPECT_EQ(v.resolve_term(t.id, c), t);
      EXPECT_EQ(v.of(c).matches(t.label).size(), 1u);
    }
  }
}

TEST(VocabularyTest, EmotionPositions) {
  Vocabularies v = builtin_vocabularies();
  auto pos = [&](std::string_view label) {
    return v.emotion_position(v.resolve_term(label, Category::Emotion));
  };
  EXPECT_DOUBLE_EQ(pos("Pleasure").valence, 1.0);
  EXPECT_DOUBLE_EQ(pos("Pleasure").arousal, 0.0);
  EXPECT_DOUBLE_EQ(pos("Arousal").valence, 0.0);
  EXPECT_DOUBLE_EQ(pos("Arousal").arousal, 1.0);

  // Quadrants as drawn: Joy positive/high, Sadness and Boredom low arousal
  // with non-positive valence, Calmness positive/low, Fear and Anxiety
  // negative valence.
  EXPECT_GT(pos("Joy").valence, 0);
  EXPECT_GT(pos("Joy").arousal, 0);
  EXPECT_LT(pos("Sadness").valence, 0);
  EXPECT_LT(pos("Sadness").arousal, 0);
  EXPECT_LT(pos("Boredom").arousal, 0);
  EXPECT_GT(pos("Calmness").valence, 0);
  EXPECT_LT(pos("Calmness").arousal, 0);
  EXPECT_LT(pos("Fear").valence, 0);
  EXPECT_GT(pos("Fear").arousal, 0);
  EXPECT_LT(pos("Anxiety").valence, 0);

  for (const Term& t : v.of(Category::Emotion).terms()) {
    const EmotionPosition& p = v.emotion_position(t);
    EXPECT_LE(p.valence * p.valence + p.arousal * p.arousal, 1.0 + 1e-9);
  }
  auto dot = [&](std::string_view a, std::string_view b) {
    return pos(a).valence * pos(b).valence + pos(a).arousal * pos(b).arousal;
  };
  EXPECT_LT(dot("Joy", "Sadness"), 0);
  EXPECT_LT(dot("Calmness", "Anxiety"), 0);
}

TEST(VocabularyTest, EmotionPositionRejectsOtherCategories) {
  Vocabularies v = builtin_vocabularies();
  for (const Term& t : v.of(Category::Genre).terms()) {
    EXPECT_EQ(code_of([&] { v.emotion_position(t); }), ErrorCode::NotAnEmotion);
  }
}

TEST(VocabularyTest, OverridesReplaceUrisAndAddTerms) {
  Vocabularies v = builtin_vocabularies();
  apply_overrides(v,
                  "category,id,label,uri\n"
                  "Genre,jazz,Jazz,http://www.wikidata.org/entity/Q8341\n"
                  "# comment line\n"
                  "Instrument,trumpet,Trumpet,urn:x:trumpet\n");
  EXPECT_EQ(v.resolve_term("jazz", Category::Genre).uri,
            "http://www.wikidata.org/entity/Q8341");
  EXPECT_EQ(v.of(Category::Instrument).size(), 13u);
  EXPECT_EQ(v.resolve_term("Trumpet", Category::Instrument).uri,
            "urn:x:trumpet");
}

TEST(VocabularyTest, OverrideErrors) {
  Vocabularies v = builtin_vocabularies();
  EXPECT_EQ(code_of([&] { apply_overrides(v, "Genre,rock,Rock,not a uri\n"); }),
            ErrorCode::InvalidIri);
  EXPECT_EQ(code_of([&] { apply_overrides(v, "Emotion,rock,Rock,urn:x\n"); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { apply_overrides(v, "Emotion,awe,Awe,urn:x\n"); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { apply_overrides(v, "Genre,rock\n"); }),
            ErrorCode::MalformedRow);
}

}  // namespace
}  // namespace crowdkb
