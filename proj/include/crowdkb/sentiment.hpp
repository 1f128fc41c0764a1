#pragma once

// Lexicon sentiment scoring for free-text comments. A text's raw score is
// the sum of its token valences, with a token's sign flipped when a negation
// occurs among the two tokens before it; the raw sum s is mapped into (-1, 1)
// by s / sqrt(s^2 + 15).

#include <cctype>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "crowdkb/catalog.hpp"
#include "crowdkb/csv.hpp"
#include "crowdkb/error.hpp"
#include "crowdkb/io.hpp"
#include "crowdkb/text.hpp"

namespace crowdkb {

inline constexpr double kSentimentAlpha = 15.0;
inline constexpr double kMaxValence = 4.0;

inline const std::set<std::string>& default_negations() {
  static const std::set<std::string> words = {
      "not",  "no",    "never", "none",  "nobody", "nothing", "neither", "nor",
      "without", "cannot", "dont", "don", "doesn", "didn", "isn", "wasn",
      "aren", "weren", "won", "wouldn", "couldn", "shouldn", "hardly", "barely"};
  return words;
}

struct SentimentLexicon {
  std::map<std::string, double> valence;
  std::set<std::string> negations = default_negations();
};

// "token,valence" lines; an optional header and # comments are skipped.
inline SentimentLexicon parse_lexicon(std::string_view contents) {
  SentimentLexicon lex;
  for (const csv::Record& rec : csv::read_all(contents)) {
    const csv::Row& row = rec.cells;
    if (!row.empty() && text::trim(row[0]).starts_with("#")) continue;
    if (row.size() != 2) {
      throw Error(ErrorCode::MalformedRow,
                  "lexicon line " + std::to_string(rec.line) + ": expected token,valence");
    }
    std::string token(text::trim(row[0]));
    if (token == "token") continue;
    std::string value(text::trim(row[1]));
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size() || !std::isfinite(v)) {
      throw Error(ErrorCode::MalformedRow, "lexicon line " + std::to_string(rec.line) +
                                               ": bad valence '" + value + "'");
    }
    if (std::abs(v) > kMaxValence) {
      throw Error(ErrorCode::InvalidArgument,
                  "lexicon line " + std::to_string(rec.line) + ": valence out of range");
    }
    if (token.empty() || token != text::to_lower(token)) {
      throw Error(ErrorCode::MalformedRow, "lexicon line " + std::to_string(rec.line) +
                                               ": token must be lowercase");
    }
    if (!lex.valence.emplace(token, v).second) {
      throw Error(ErrorCode::MalformedRow, "lexicon line " + std::to_string(rec.line) +
                                               ": duplicate token '" + token + "'");
    }
  }
  return lex;
}

inline SentimentLexicon load_lexicon(const std::filesystem::path& path) {
  return parse_lexicon(io::read_file(path));
}

inline std::string_view builtin_lexicon_text() {
  static constexpr std::string_view text = R"LEX(token,valence
admire,2.1
afraid,-2.0
aggressive,-1.4
amazing,2.8
anger,-2.3
angry,-2.3
annoying,-1.9
anxiety,-1.9
anxious,-1.8
appreciate,1.7
authentic,1.5
awesome,3.1
awful,-2.9
awkward,-1.3
bad,-2.5
balanced,1.3
beautiful,2.0
beauty,2.6
best,3.2
better,1.9
bland,-1.4
bored,-1.7
boring,-1.9
bravo,2.5
bright,1.5
brilliant,2.8
broken,-1.9
calm,1.5
calming,1.7
catchy,1.7
charming,2.2
cheerful,2.5
cheesy,-1.1
classic,1.4
clean,1.3
clear,1.2
confused,-1.5
confusing,-1.6
cool,1.3
corrupted,-2.0
creative,1.9
creepy,-1.9
crisp,1.2
cry,-2.1
crying,-2.1
cut,-0.9
damaged,-1.8
danceable,1.8
dark,-0.8
delightful,2.8
depressing,-2.3
difficult,-1.1
disappointed,-2.1
disappointing,-2.2
dislike,-1.6
distorted,-1.2
disturbing,-2.1
dreamy,1.6
dull,-1.7
elegant,2.1
emotional,0.8
energetic,1.8
enjoy,2.2
enjoyable,2.2
enjoyed,2.3
epic,2.2
error,-1.6
excellent,2.7
excited,2.1
exciting,2.2
fail,-2.3
failed,-2.3
fantastic,2.6
favorite,2.0
favourite,2.0
fear,-2.2
festive,1.9
fine,0.8
flat,-1.1
fresh,1.4
fun,2.3
funny,1.9
gentle,1.6
glad,2.0
gloomy,-1.7
good,1.9
gorgeous,3.0
graceful,2.1
grand,1.7
great,3.1
grief,-2.6
groovy,1.9
happy,2.7
hard,-0.4
harmonious,2.0
harsh,-1.5
hate,-2.7
hated,-2.8
haunting,0.6
heavenly,2.8
hopeful,1.9
horrible,-2.9
impossible,-1.6
impressive,2.3
incredible,2.6
inspiring,2.4
interesting,1.7
irritating,-2.0
issue,-1.0
joy,2.8
joyful,2.9
lacking,-1.3
lame,-1.8
like,1.5
liked,1.6
lively,1.8
lonely,-2.0
love,3.0
loved,2.9
lovely,2.8
magnificent,3.0
majestic,2.3
masterpiece,3.1
mediocre,-1.3
meh,-0.8
melancholic,-1.0
melancholy,-1.0
melodic,1.2
missing,-1.2
mistake,-1.6
monotonous,-1.6
moving,1.7
muddy,-1.2
muffled,-1.3
nervous,-1.6
nice,1.8
noise,-1.0
noisy,-1.3
nostalgic,0.9
off,-0.6
original,1.5
outstanding,2.9
overrated,-1.3
pain,-2.4
painful,-2.4
peaceful,2.2
perfect,2.7
playful,1.8
pleasant,2.3
pleasure,2.5
pointless,-1.7
poor,-2.1
powerful,1.8
problem,-1.7
quiet,-0.2
recommend,1.5
relaxed,1.8
relaxing,1.9
repetitive,-1.3
rhythmic,0.9
rich,1.6
romantic,1.9
sad,-2.1
sadly,-1.8
sadness,-1.9
scary,-2.2
scratchy,-1.3
serene,2.0
short,-0.3
skilled,1.8
sloppy,-1.7
smooth,1.5
soft,1.0
soothing,2.0
sorry,-0.5
strong,1.5
stunning,2.6
superb,2.9
sweet,2.0
talented,2.3
tears,-1.2
tedious,-1.8
tender,1.5
tense,-1.4
terrible,-2.9
thank,1.5
thanks,1.9
touching,1.8
tragic,-2.5
tranquil,1.9
ugly,-2.3
unbearable,-2.7
unclear,-1.0
uncomfortable,-1.6
unfortunately,-1.5
unique,1.6
unpleasant,-2.1
uplifting,2.4
useless,-1.8
vibrant,2.0
virtuoso,2.3
warm,1.4
waste,-1.8
weak,-1.5
well,1.1
wonderful,2.7
worse,-2.1
worst,-3.1
wow,2.8
wrong,-2.1
)LEX";
  return text;
}

inline const SentimentLexicon& builtin_lexicon() {
  static const SentimentLexicon lex = parse_lexicon(builtin_lexicon_text());
  return lex;
}

// Letters are ASCII letters and any byte of a multi-byte character.
inline std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    if (std::isalpha(u) || u >= 0x80) {
      cur.push_back(text::ascii_lower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline double raw_sentiment(std::string_view s, const SentimentLexicon& lex) {
  std::vector<std::string> tokens = tokenize(s);
  double sum = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto it = lex.valence.find(tokens[i]);
    if (it == lex.valence.end()) continue;
    bool negated = false;
    for (std::size_t back = 1; back <= 2 && back <= i; ++back) {
      negated = negated || lex.negations.count(tokens[i - back]) > 0;
    }
    sum += negated ? -it->second : it->second;
  }
  return sum;
}

inline double sentiment_score(std::string_view s,
                              const SentimentLexicon& lex = builtin_lexicon()) {
  double raw = raw_sentiment(s, lex);
  return raw / std::sqrt(raw * raw + kSentimentAlpha);
}

inline double track_sentiment(const TrackRecord& r,
                              const SentimentLexicon& lex = builtin_lexicon()) {
  if (r.comments.empty()) return 0;
  double sum = 0;
  for (const std::string& c : r.comments) sum += sentiment_score(c, lex);
  return sum / static_cast<double>(r.comments.size());
}

}  // namespace crowdkb
