#pragma once

// Serialized forms of campaign data: the delimited-text contribution export,
// JSON encodings shared with the HTTP layer, and the append-only event log
// that persists a CampaignStore.

#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "crowdkb/campaign.hpp"
#include "crowdkb/catalog.hpp"
#include "crowdkb/csv.hpp"
#include "crowdkb/io.hpp"

namespace crowdkb {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Export files

inline constexpr std::string_view kAnnotationsFile = "annotations.csv";
inline constexpr std::string_view kCommentsFile = "comments.csv";

inline std::string format_annotation_rows(const CampaignExport& e) {
  std::ostringstream os;
  csv::write_row(os, {"item_id", "category", "term_id", "upvotes", "downvotes",
                      "creator"});
  for (const ExportRow& r : e.rows) {
    csv::write_row(os, {r.item_id, std::string(category_name(r.category)),
                        r.term_id, std::to_string(r.upvotes),
                        std::to_string(r.downvotes), r.creator});
  }
  return os.str();
}

inline std::string format_comment_rows(const CampaignExport& e) {
  std::ostringstream os;
  csv::write_row(os, {"item_id", "author", "created_at", "text"});
  for (const CommentRow& c : e.comments) {
    csv::write_row(os, {c.item_id, c.author, text::format_timestamp(c.created_at),
                        c.text});
  }
  return os.str();
}

inline void write_export(const CampaignExport& e,
                         const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::WriteFailure, "cannot create " + dir.string());
  io::write_file(dir / kAnnotationsFile, format_annotation_rows(e));
  io::write_file(dir / kCommentsFile, format_comment_rows(e));
}

namespace detail {

inline void expect_header(const csv::Record& rec,
                          std::initializer_list<std::string_view> names,
                          std::string_view file) {
  bool ok = rec.cells.size() == names.size();
  std::size_t i = 0;
  for (std::string_view n : names) {
    if (!ok) break;
    ok = text::trim(rec.cells[i++]) == n;
  }
  if (!ok) {
    throw Error(ErrorCode::MalformedHeader, "unexpected header in " +
                                                std::string(file));
  }
}

inline std::int64_t parse_count(const std::string& s, std::size_t line) {
  auto v = text::parse_int<std::int64_t>(text::trim(s));
  if (!v || *v < 0) {
    throw Error(ErrorCode::MalformedRow,
                "bad vote count '" + s + "' on line " + std::to_string(line));
  }
  return *v;
}

}  // namespace detail

inline CampaignExport parse_export(std::string_view annotations_csv,
                                   std::string_view comments_csv) {
  CampaignExport e;
  auto rows = csv::read_all(annotations_csv);
  if (rows.empty()) throw Error(ErrorCode::MalformedHeader, "empty annotations");
  detail::expect_header(rows[0], {"item_id", "category", "term_id", "upvotes",
                                  "downvotes", "creator"},
                        kAnnotationsFile);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const csv::Record& rec = rows[i];
    if (rec.cells.size() != 6) {
      throw Error(ErrorCode::MalformedRow,
                  "annotations line " + std::to_string(rec.line));
    }
    auto category = parse_category(rec.cells[1]);
    if (!category) {
      throw Error(ErrorCode::MalformedRow,
                  "unknown category on line " + std::to_string(rec.line));
    }
    e.rows.push_back({rec.cells[0], *category, rec.cells[2],
                      detail::parse_count(rec.cells[3], rec.line),
                      detail::parse_count(rec.cells[4], rec.line),
                      rec.cells[5]});
  }
  auto comments = csv::read_all(comments_csv);
  if (comments.empty()) throw Error(ErrorCode::MalformedHeader, "empty comments");
  detail::expect_header(comments[0], {"item_id", "author", "created_at", "text"},
                        kCommentsFile);
  for (std::size_t i = 1; i < comments.size(); ++i) {
    const csv::Record& rec = comments[i];
    if (rec.cells.size() != 4) {
      throw Error(ErrorCode::MalformedRow,
                  "comments line " + std::to_string(rec.line));
    }
    auto ts = text::parse_timestamp(rec.cells[2]);
    if (!ts) {
      throw Error(ErrorCode::MalformedRow,
                  "bad timestamp on comments line " + std::to_string(rec.line));
    }
    e.comments.push_back({rec.cells[0], rec.cells[1], *ts, rec.cells[3]});
  }
  return e;
}

inline CampaignExport read_export(const std::filesystem::path& dir) {
  return parse_export(io::read_file(dir / kAnnotationsFile),
                      io::read_file(dir / kCommentsFile));
}

// ---------------------------------------------------------------------------
// JSON

inline Json to_json(const TrackRecord& r) {
  Json j;
  j["europeana_id"] = r.europeana_id;
  auto put = [&](const char* key, const auto& v) {
    if (!v) return;
    if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, Date>) {
      j[key] = v->to_string();
    } else {
      j[key] = *v;
    }
  };
  put("title", r.title);
  put("year", r.year);
  put("duration_ms", r.duration_ms);
  put("composer", r.composer);
  put("composer_birth", r.composer_birth);
  put("composer_death", r.composer_death);
  put("biography", r.biography);
  put("publisher", r.publisher);
  put("place", r.place);
  put("audio_url", r.audio_url);
  j["genres"] = r.genres;
  j["emotions"] = r.emotions;
  j["instruments"] = r.instruments;
  j["comments"] = r.comments;
  return j;
}

inline TrackRecord record_from_json(const Json& j) {
  TrackRecord r;
  r.europeana_id = j.at("europeana_id").get<std::string>();
  auto str = [&](const char* key, std::optional<std::string>& out) {
    if (j.contains(key)) out = j[key].get<std::string>();
  };
  auto date = [&](const char* key, std::optional<Date>& out) {
    if (!j.contains(key)) return;
    out = Date::parse(j[key].get<std::string>());
    if (!out) throw Error(ErrorCode::MalformedDate, key);
  };
  str("title", r.title);
  if (j.contains("year")) r.year = j["year"].get<int>();
  if (j.contains("duration_ms")) r.duration_ms = j["duration_ms"].get<std::int64_t>();
  str("composer", r.composer);
  date("composer_birth", r.composer_birth);
  date("composer_death", r.composer_death);
  str("biography", r.biography);
  str("publisher", r.publisher);
  str("place", r.place);
  str("audio_url", r.audio_url);
  if (j.contains("genres")) r.genres = j["genres"].get<std::set<std::string>>();
  if (j.contains("emotions")) r.emotions = j["emotions"].get<std::set<std::string>>();
  if (j.contains("instruments")) {
    r.instruments = j["instruments"].get<std::set<std::string>>();
  }
  if (j.contains("comments")) {
    r.comments = j["comments"].get<std::vector<std::string>>();
  }
  return r;
}

inline Json to_json(const Campaign& c) {
  return Json{{"id", c.id},
              {"title", c.title},
              {"instructions", c.instructions},
              {"item_ids", c.item_ids},
              {"batch_count", c.batch_count},
              {"start", text::format_timestamp(c.start)},
              {"end", text::format_timestamp(c.end)}};
}

inline Timestamp timestamp_from_json(const Json& j) {
  auto ts = text::parse_timestamp(j.get<std::string>());
  if (!ts) throw Error(ErrorCode::InvalidArgument, "bad timestamp " + j.dump());
  return *ts;
}

inline Campaign campaign_from_json(const Json& j) {
  Campaign c;
  c.id = j.at("id").get<std::string>();
  c.title = j.value("title", "");
  c.instructions = j.value("instructions", "");
  c.item_ids = j.at("item_ids").get<std::vector<std::string>>();
  c.batch_count = j.value("batch_count", std::size_t{8});
  c.start = timestamp_from_json(j.at("start"));
  c.end = timestamp_from_json(j.at("end"));
  return c;
}

inline Json to_json(const Annotation& a) {
  return Json{{"id", a.id},
              {"item_id", a.item_id},
              {"term_id", a.term_id},
              {"category", category_name(a.category)},
              {"creator", a.creator},
              {"created_at", text::format_timestamp(a.created_at)},
              {"upvotes", a.upvotes},
              {"downvotes", a.downvotes}};
}

inline Json to_json(const Comment& c) {
  return Json{{"id", c.id},
              {"item_id", c.item_id},
              {"author", c.author},
              {"text", c.text},
              {"created_at", text::format_timestamp(c.created_at)}};
}

inline Json to_json(const CampaignExport& e) {
  Json rows = Json::array();
  for (const ExportRow& r : e.rows) {
    rows.push_back({{"item_id", r.item_id},
                    {"category", category_name(r.category)},
                    {"term_id", r.term_id},
                    {"upvotes", r.upvotes},
                    {"downvotes", r.downvotes},
                    {"creator", r.creator}});
  }
  Json comments = Json::array();
  for (const CommentRow& c : e.comments) {
    comments.push_back({{"item_id", c.item_id},
                        {"author", c.author},
                        {"created_at", text::format_timestamp(c.created_at)},
                        {"text", c.text}});
  }
  return Json{{"annotations", rows}, {"comments", comments}};
}

// ---------------------------------------------------------------------------
// Event log

// Appends one JSON object per line for every store mutation and flushes
// after each line.
class EventLog : public StoreObserver {
 public:
  explicit EventLog(const std::filesystem::path& path) : path_(path) {
    out_.open(path, std::ios::binary | std::ios::app);
    if (!out_) throw Error(ErrorCode::WriteFailure, "cannot open " + path.string());
  }

  void on_campaign(const Campaign& c,
                   const std::vector<TrackRecord>& records) override {
    Json recs = Json::array();
    for (const TrackRecord& r : records) recs.push_back(to_json(r));
    append({{"op", "campaign"}, {"campaign", to_json(c)}, {"records", recs}});
  }
  void on_annotation(const Annotation& a) override {
    append({{"op", "annotate"},
            {"item_id", a.item_id},
            {"term_id", a.term_id},
            {"category", category_name(a.category)},
            {"user", a.creator},
            {"at", text::format_timestamp(a.created_at)}});
  }
  void on_vote(const Vote& v) override {
    append({{"op", "vote"},
            {"annotation_id", v.annotation_id},
            {"user", v.voter},
            {"direction", direction_name(v.direction)},
            {"at", text::format_timestamp(v.cast_at)}});
  }
  void on_comment(const Comment& c) override {
    append({{"op", "comment"},
            {"item_id", c.item_id},
            {"user", c.author},
            {"text", c.text},
            {"at", text::format_timestamp(c.created_at)}});
  }

  void flush() {
    std::lock_guard lock(mu_);
    out_.flush();
  }

 private:
  void append(const Json& event) {
    std::lock_guard lock(mu_);
    out_ << event.dump() << '\n';
    out_.flush();
    if (!out_) throw Error(ErrorCode::WriteFailure, "append to " + path_.string());
  }

  std::filesystem::path path_;
  std::mutex mu_;
  std::ofstream out_;
};

// Re-applies a log to an empty store. Any unparsable or inapplicable line
// means the log is corrupt.
inline void replay_log(CampaignStore& store, std::string_view contents) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < contents.size()) {
    std::size_t end = contents.find('\n', start);
    if (end == std::string_view::npos) end = contents.size();
    std::string_view line = contents.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      Json ev = Json::parse(line);
      std::string op = ev.at("op").get<std::string>();
      if (op == "campaign") {
        std::vector<TrackRecord> records;
        for (const Json& r : ev.at("records")) records.push_back(record_from_json(r));
        store.add_campaign(campaign_from_json(ev.at("campaign")), records);
      } else if (op == "annotate") {
        auto category = parse_category(ev.at("category").get<std::string>());
        if (!category) throw Error(ErrorCode::CorruptStore, "bad category");
        store.submit_annotation_at(ev.at("item_id").get<std::string>(),
                                   ev.at("term_id").get<std::string>(), *category,
                                   ev.at("user").get<std::string>(),
                                   timestamp_from_json(ev.at("at")));
      } else if (op == "vote") {
        auto dir = parse_direction(ev.at("direction").get<std::string>());
        if (!dir) throw Error(ErrorCode::CorruptStore, "bad direction");
        store.cast_vote_at(ev.at("annotation_id").get<std::string>(),
                           ev.at("user").get<std::string>(), *dir,
                           timestamp_from_json(ev.at("at")));
      } else if (op == "comment") {
        store.add_comment_at(ev.at("item_id").get<std::string>(),
                             ev.at("user").get<std::string>(),
                             ev.at("text").get<std::string>(),
                             timestamp_from_json(ev.at("at")));
      } else {
        throw Error(ErrorCode::CorruptStore, "unknown op " + op);
      }
    } catch (const Error& e) {
      throw Error(ErrorCode::CorruptStore,
                  "log line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::CorruptStore,
                  "log line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

// Store backed by a log file: replays it on open, then appends.
class PersistentStore {
 public:
  PersistentStore(const std::filesystem::path& log_path, Vocabularies vocab,
                  CampaignStore::Clock clock = &CampaignStore::system_now)
      : store_(std::move(vocab), std::move(clock)) {
    if (std::filesystem::exists(log_path)) {
      replay_log(store_, io::read_file(log_path));
    }
    log_ = std::make_unique<EventLog>(log_path);
    store_.set_observer(log_.get());
  }

  ~PersistentStore() {
    store_.set_observer(nullptr);
    if (log_) log_->flush();
  }

  CampaignStore& store() { return store_; }
  void flush() { log_->flush(); }

 private:
  CampaignStore store_;
  std::unique_ptr<EventLog> log_;
};

}  // namespace crowdkb
