#pragma once

// Track metadata records: parsing from delimited text, curation filters and
// the enriched-dataset export.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "crowdkb/csv.hpp"
#include "crowdkb/error.hpp"
#include "crowdkb/io.hpp"
#include "crowdkb/text.hpp"
#include "crowdkb/vocabulary.hpp"

namespace crowdkb {

// ISO-8601 calendar date with optional month/day precision: "1850",
// "1850-03" or "1850-03-21".
struct Date {
  int year = 0;
  std::optional<unsigned> month;
  std::optional<unsigned> day;

  friend bool operator==(const Date&, const Date&) = default;

  std::string to_string() const {
    std::ostringstream os;
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d", year);
    os << buf;
    if (month) {
      std::snprintf(buf, sizeof buf, "-%02u", *month);
      os << buf;
      if (day) {
        std::snprintf(buf, sizeof buf, "-%02u", *day);
        os << buf;
      }
    }
    return os.str();
  }

  static std::optional<Date> parse(std::string_view s) {
    s = text::trim(s);
    auto parts = text::split(s, '-');
    if (parts.empty() || parts.size() > 3) return std::nullopt;
    if (parts[0].size() != 4) return std::nullopt;
    auto y = text::parse_int<int>(parts[0]);
    if (!y) return std::nullopt;
    Date d{*y, std::nullopt, std::nullopt};
    if (parts.size() >= 2) {
      if (parts[1].size() != 2) return std::nullopt;
      auto m = text::parse_int<unsigned>(parts[1]);
      if (!m || *m < 1 || *m > 12) return std::nullopt;
      d.month = *m;
    }
    if (parts.size() == 3) {
      if (parts[2].size() != 2) return std::nullopt;
      auto dd = text::parse_int<unsigned>(parts[2]);
      if (!dd) return std::nullopt;
      std::chrono::year_month_day ymd{std::chrono::year{*y},
                                      std::chrono::month{*d.month},
                                      std::chrono::day{*dd}};
      if (!ymd.ok()) return std::nullopt;
      d.day = *dd;
    }
    return d;
  }
};

// True when `later` cannot be shown to precede `earlier` at the precision
// both dates share.
inline bool not_before(const Date& later, const Date& earlier) {
  if (later.year != earlier.year) return later.year > earlier.year;
  if (!later.month || !earlier.month) return true;
  if (*later.month != *earlier.month) return *later.month > *earlier.month;
  if (!later.day || !earlier.day) return true;
  return *later.day >= *earlier.day;
}

struct TrackRecord {
  std::string europeana_id;
  std::optional<std::string> title;
  std::optional<int> year;
  std::optional<std::int64_t> duration_ms;
  std::optional<std::string> composer;
  std::optional<Date> composer_birth;
  std::optional<Date> composer_death;
  std::optional<std::string> biography;
  std::optional<std::string> publisher;
  std::optional<std::string> place;
  std::optional<std::string> audio_url;

  std::set<std::string> genres;
  std::set<std::string> emotions;
  std::set<std::string> instruments;
  std::vector<std::string> comments;

  friend bool operator==(const TrackRecord&, const TrackRecord&) = default;

  std::set<std::string>& tags(Category c) {
    switch (c) {
      case Category::Emotion: return emotions;
      case Category::Genre: return genres;
      case Category::Instrument: return instruments;
    }
    return genres;
  }
  const std::set<std::string>& tags(Category c) const {
    return const_cast<TrackRecord*>(this)->tags(c);
  }
};

// Record field names, as used by CurationPolicy::required_fields.
inline constexpr std::array<std::string_view, 11> kTrackFields = {
    "europeana_id", "title",     "year",      "duration_ms",
    "composer",     "composer_birth", "composer_death", "biography",
    "publisher",    "place",     "audio_url"};

inline bool has_field(const TrackRecord& r, std::string_view field) {
  if (field == "europeana_id") return !r.europeana_id.empty();
  if (field == "title") return r.title.has_value();
  if (field == "year") return r.year.has_value();
  if (field == "duration_ms") return r.duration_ms.has_value();
  if (field == "composer") return r.composer.has_value();
  if (field == "composer_birth") return r.composer_birth.has_value();
  if (field == "composer_death") return r.composer_death.has_value();
  if (field == "biography") return r.biography.has_value();
  if (field == "publisher") return r.publisher.has_value();
  if (field == "place") return r.place.has_value();
  if (field == "audio_url") return r.audio_url.has_value();
  return false;
}

// Column headers of the delimited-text format, in export order.
namespace column {
inline constexpr std::string_view kId = "EuropeanaID";
inline constexpr std::string_view kTitle = "Title";
inline constexpr std::string_view kYear = "Year";
inline constexpr std::string_view kDuration = "Duration";
inline constexpr std::string_view kComposer = "Composer";
inline constexpr std::string_view kBirth = "DateOfBirth";
inline constexpr std::string_view kDeath = "DateOfDeath";
inline constexpr std::string_view kBiography = "Biography";
inline constexpr std::string_view kPublisher = "Publisher";
inline constexpr std::string_view kPlace = "Place";
inline constexpr std::string_view kAudioUrl = "AudioURL";
inline constexpr std::string_view kGenre = "Genre";
inline constexpr std::string_view kEmotion = "Emotion";
inline constexpr std::string_view kInstrument = "Instrument";
inline constexpr std::string_view kComments = "Comments";
}  // namespace column

inline constexpr std::array<std::string_view, 15> kColumns = {
    column::kId,        column::kTitle,     column::kYear,
    column::kDuration,  column::kComposer,  column::kBirth,
    column::kDeath,     column::kBiography, column::kPublisher,
    column::kPlace,     column::kAudioUrl,  column::kGenre,
    column::kEmotion,   column::kInstrument, column::kComments};

inline std::optional<std::string_view> canonical_column(std::string_view name) {
  name = text::trim(name);
  for (std::string_view c : kColumns) {
    if (text::iequals(c, name)) return c;
  }
  return std::nullopt;
}

// Comments share one cell: ';' separates entries, backslash escapes ';' and
// itself inside an entry.
inline std::string encode_comments(const std::vector<std::string>& comments) {
  std::string out;
  for (std::size_t i = 0; i < comments.size(); ++i) {
    if (i) out.push_back(';');
    for (char c : comments[i]) {
      if (c == ';' || c == '\\') out.push_back('\\');
      out.push_back(c);
    }
  }
  return out;
}

inline std::vector<std::string> decode_comments(std::string_view cell) {
  std::vector<std::string> out;
  if (cell.empty()) return out;
  std::string cur;
  for (std::size_t i = 0; i < cell.size(); ++i) {
    char c = cell[i];
    if (c == '\\' && i + 1 < cell.size()) {
      cur.push_back(cell[++i]);
    } else if (c == ';') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

// Key-value form of a row. Keys are column headers (case-insensitive).
using RowMap = std::map<std::string, std::string>;

inline TrackRecord parse_record(const RowMap& row, const Vocabularies& vocab) {
  std::map<std::string_view, std::string_view> cells;
  for (const auto& [key, value] : row) {
    auto col = canonical_column(key);
    std::string_view v = text::trim(value);
    if (!col) {
      if (!v.empty()) {
        throw Error(ErrorCode::MalformedRow,
                    "populated cell in unknown column '" + key + "'");
      }
      continue;
    }
    cells[*col] = v;
  }
  auto cell = [&](std::string_view col) -> std::optional<std::string> {
    auto it = cells.find(col);
    if (it == cells.end() || it->second.empty()) return std::nullopt;
    return std::string(it->second);
  };

  TrackRecord r;
  auto id = cell(column::kId);
  if (!id) throw Error(ErrorCode::MissingIdentifier, "EuropeanaID is empty");
  r.europeana_id = *id;
  r.title = cell(column::kTitle);
  if (auto y = cell(column::kYear)) {
    auto value = text::parse_int<int>(*y);
    if (!value || y->size() > 4 || *value < 0) {
      throw Error(ErrorCode::MalformedDate, "Year '" + *y + "' for " + *id);
    }
    r.year = *value;
  }
  if (auto d = cell(column::kDuration)) {
    auto value = text::parse_int<std::int64_t>(*d);
    if (!value || *value < 0) {
      throw Error(ErrorCode::MalformedDuration,
                  "Duration '" + *d + "' for " + *id);
    }
    r.duration_ms = *value;
  }
  r.composer = cell(column::kComposer);
  auto date = [&](std::string_view col) -> std::optional<Date> {
    auto c = cell(col);
    if (!c) return std::nullopt;
    auto parsed = Date::parse(*c);
    if (!parsed) {
      throw Error(ErrorCode::MalformedDate,
                  std::string(col) + " '" + *c + "' for " + *id);
    }
    return parsed;
  };
  r.composer_birth = date(column::kBirth);
  r.composer_death = date(column::kDeath);
  if (r.composer_birth && r.composer_death &&
      !not_before(*r.composer_death, *r.composer_birth)) {
    throw Error(ErrorCode::MalformedDate,
                "DateOfDeath precedes DateOfBirth for " + *id);
  }
  r.biography = cell(column::kBiography);
  r.publisher = cell(column::kPublisher);
  r.place = cell(column::kPlace);
  r.audio_url = cell(column::kAudioUrl);

  auto tags = [&](std::string_view col, Category category) {
    std::set<std::string> out;
    auto c = cell(col);
    if (!c) return out;
    for (const std::string& part : text::split(*c, ';')) {
      if (text::trim(part).empty()) continue;
      out.insert(vocab.resolve_term(part, category).id);
    }
    return out;
  };
  r.genres = tags(column::kGenre, Category::Genre);
  r.emotions = tags(column::kEmotion, Category::Emotion);
  r.instruments = tags(column::kInstrument, Category::Instrument);
  if (auto c = cell(column::kComments)) r.comments = decode_comments(*c);
  return r;
}

inline TrackRecord parse_record(const csv::Row& header, const csv::Row& cells,
                                const Vocabularies& vocab) {
  if (cells.size() != header.size()) {
    throw Error(ErrorCode::MalformedRow,
                "expected " + std::to_string(header.size()) + " cells, got " +
                    std::to_string(cells.size()));
  }
  RowMap row;
  for (std::size_t i = 0; i < header.size(); ++i) row[header[i]] = cells[i];
  return parse_record(row, vocab);
}

struct RowError {
  std::size_t line = 0;
  ErrorCode code = ErrorCode::MalformedRow;
  std::string message;
};

struct LoadResult {
  std::vector<TrackRecord> records;
  std::vector<RowError> errors;
};

inline LoadResult parse_dataset(std::string_view contents,
                                const Vocabularies& vocab) {
  csv::Reader reader(contents);
  csv::Record header;
  if (!reader.next(header)) {
    throw Error(ErrorCode::EmptyDataset, "no header row");
  }
  bool has_id = false;
  for (const std::string& h : header.cells) {
    auto col = canonical_column(h);
    if (!col) {
      throw Error(ErrorCode::MalformedHeader, "unknown column '" + h + "'");
    }
    has_id = has_id || *col == column::kId;
  }
  if (!has_id) {
    throw Error(ErrorCode::MalformedHeader, "missing EuropeanaID column");
  }

  LoadResult result;
  std::set<std::string> seen;
  std::size_t rows = 0;
  csv::Record rec;
  for (;;) {
    try {
      if (!reader.next(rec)) break;
    } catch (const Error& e) {
      result.errors.push_back({rec.line, e.code(), e.detail()});
      ++rows;
      break;
    }
    ++rows;
    try {
      TrackRecord r = parse_record(header.cells, rec.cells, vocab);
      if (!seen.insert(r.europeana_id).second) {
        throw Error(ErrorCode::DuplicateTrackId, r.europeana_id);
      }
      result.records.push_back(std::move(r));
    } catch (const Error& e) {
      result.errors.push_back({rec.line, e.code(), e.detail()});
    }
  }
  if (rows == 0) throw Error(ErrorCode::EmptyDataset, "no data rows");
  return result;
}

inline LoadResult load_dataset(const std::filesystem::path& path,
                               const Vocabularies& vocab) {
  return parse_dataset(io::read_file(path), vocab);
}

inline std::string format_dataset(const std::vector<TrackRecord>& records,
                                  const Vocabularies& vocab) {
  std::ostringstream os;
  csv::write_row(os, csv::Row(kColumns.begin(), kColumns.end()));
  auto opt = [](const auto& v) -> std::string {
    if (!v) return {};
    if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, std::string>) {
      return *v;
    } else if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, Date>) {
      return v->to_string();
    } else {
      return std::to_string(*v);
    }
  };
  auto labels = [&](const std::set<std::string>& ids, Category c) {
    std::vector<std::string> out;
    for (const std::string& id : ids) {
      const Term* t = vocab.of(c).find_id(id);
      if (!t) {
        throw Error(ErrorCode::UnknownTerm,
                    "'" + id + "' is not a " + std::string(category_name(c)) +
                        " term");
      }
      out.push_back(t->label);
    }
    std::sort(out.begin(), out.end());
    std::string cell;
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (i) cell.push_back(';');
      cell += out[i];
    }
    return cell;
  };
  for (const TrackRecord& r : records) {
    csv::write_row(os, {r.europeana_id, opt(r.title), opt(r.year),
                        opt(r.duration_ms), opt(r.composer),
                        opt(r.composer_birth), opt(r.composer_death),
                        opt(r.biography), opt(r.publisher), opt(r.place),
                        opt(r.audio_url), labels(r.genres, Category::Genre),
                        labels(r.emotions, Category::Emotion),
                        labels(r.instruments, Category::Instrument),
                        encode_comments(r.comments)});
  }
  return os.str();
}

inline void export_enriched(const std::vector<TrackRecord>& records,
                            const std::filesystem::path& path,
                            const Vocabularies& vocab) {
  io::write_file(path, format_dataset(records, vocab));
}

// ---------------------------------------------------------------------------
// Curation

struct CurationPolicy {
  std::int64_t max_duration_ms = 360000;
  std::set<std::string> required_fields = {"europeana_id", "title", "composer",
                                           "duration_ms"};

  void validate() const {
    if (max_duration_ms <= 0) {
      throw Error(ErrorCode::InvalidArgument, "max_duration_ms must be > 0");
    }
    for (const std::string& f : required_fields) {
      if (std::find(kTrackFields.begin(), kTrackFields.end(), f) ==
          kTrackFields.end()) {
        throw Error(ErrorCode::InvalidArgument,
                    "'" + f + "' is not a record field");
      }
    }
  }
};

enum class RejectCode { DurationExceeded, MissingRequiredField };

struct RejectReason {
  RejectCode code = RejectCode::DurationExceeded;
  std::string field;  // set for MissingRequiredField

  friend bool operator==(const RejectReason&, const RejectReason&) = default;

  std::string to_string() const {
    if (code == RejectCode::DurationExceeded) return "DurationExceeded";
    return "MissingRequiredField(" + field + ")";
  }
};

struct Rejection {
  TrackRecord record;
  std::vector<RejectReason> reasons;
};

struct CurationResult {
  std::vector<TrackRecord> kept;
  std::vector<Rejection> rejected;
};

inline std::vector<RejectReason> curation_reasons(const TrackRecord& r,
                                                  const CurationPolicy& policy) {
  std::vector<RejectReason> reasons;
  if (r.duration_ms && *r.duration_ms > policy.max_duration_ms) {
    reasons.push_back({RejectCode::DurationExceeded, {}});
  }
  for (std::string_view f : kTrackFields) {
    if (policy.required_fields.count(std::string(f)) && !has_field(r, f)) {
      reasons.push_back({RejectCode::MissingRequiredField, std::string(f)});
    }
  }
  return reasons;
}

inline CurationResult apply_curation(const std::vector<TrackRecord>& records,
                                     const CurationPolicy& policy) {
  policy.validate();
  CurationResult out;
  for (const TrackRecord& r : records) {
    auto reasons = curation_reasons(r, policy);
    if (reasons.empty()) {
      out.kept.push_back(r);
    } else {
      out.rejected.push_back({r, std::move(reasons)});
    }
  }
  return out;
}

}  // namespace crowdkb
