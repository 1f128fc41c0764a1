#pragma once

// HTTP/JSON API over a CampaignStore.
//
//   GET  /campaigns
//   GET  /campaigns/{id}
//   GET  /campaigns/{id}/batches/{n}/items
//   POST /items/{id}/annotations   {term_id, category, user}
//   POST /annotations/{id}/votes   {user, direction}
//   POST /items/{id}/comments      {user, text}
//   GET  /campaigns/{id}/leaderboard
//   GET  /campaigns/{id}/export
//
// Successful responses are {"data": ...}; failures are
// {"error": {"code": "<ErrorCode name>", "message": "..."}}. A missing
// "user" field falls back to the X-User-Id header. Item ids are matched
// greedily, so ids containing '/' work whether or not they are escaped.

#include <sys/socket.h>

#include <condition_variable>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "crowdkb/campaign.hpp"
#include "crowdkb/campaign_io.hpp"
#include "crowdkb/error.hpp"
#include "crowdkb/vocabulary.hpp"

namespace crowdkb {

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingIdentifier:
    case ErrorCode::MalformedDuration:
    case ErrorCode::MalformedDate:
    case ErrorCode::MalformedHeader:
    case ErrorCode::MalformedRow:
    case ErrorCode::EmptyDataset:
    case ErrorCode::TooFewItems:
    case ErrorCode::EmptyComment:
    case ErrorCode::CommentTooLong:
    case ErrorCode::InvalidIri:
    case ErrorCode::SyntaxError:
    case ErrorCode::UnknownPrefix:
    case ErrorCode::UnboundSelectVariable:
    case ErrorCode::TypeMismatch:
    case ErrorCode::EmptyTransactionSet:
    case ErrorCode::EmptyCorpus:
    case ErrorCode::BadRequest:
    case ErrorCode::InvalidArgument:
      return 400;
    case ErrorCode::FileUnreadable:
    case ErrorCode::UnknownCampaign:
    case ErrorCode::UnknownItem:
    case ErrorCode::UnknownAnnotation:
    case ErrorCode::NotFound:
      return 404;
    case ErrorCode::DuplicateCampaign:
    case ErrorCode::CampaignClosed:
    case ErrorCode::DuplicateAnnotation:
    case ErrorCode::SelfVote:
    case ErrorCode::DuplicateTrackId:
      return 409;
    case ErrorCode::UnknownTerm:
    case ErrorCode::AmbiguousTerm:
    case ErrorCode::NotAnEmotion:
    case ErrorCode::UnknownItemInExport:
    case ErrorCode::UnknownPredicate:
      return 422;
    case ErrorCode::WriteFailure:
    case ErrorCode::PortInUse:
    case ErrorCode::CorruptStore:
      return 500;
  }
  return 500;
}

inline Json error_body(ErrorCode code, const std::string& message) {
  return Json{{"error", {{"code", code_name(code)}, {"message", message}}}};
}

class ApiServer {
 public:
  explicit ApiServer(CampaignStore& store, std::function<void()> on_stop = {})
      : store_(store), on_stop_(std::move(on_stop)) {
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });
    routes();
  }

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  ~ApiServer() { stop(); }

  // Port 0 picks a free port.
  void bind(const std::string& host, int port) {
    if (port == 0) {
      port_ = server_.bind_to_any_port(host);
      if (port_ < 0) throw Error(ErrorCode::PortInUse, host + ":0");
    } else {
      if (!server_.bind_to_port(host, port)) {
        throw Error(ErrorCode::PortInUse, host + ":" + std::to_string(port));
      }
      port_ = port;
    }
  }

  int port() const { return port_; }

  void start() {
    if (port_ < 0) throw Error(ErrorCode::InvalidArgument, "bind before start");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  // Blocks until stop() is called from elsewhere.
  void wait() {
    std::unique_lock lock(stop_mu_);
    stop_cv_.wait(lock, [this] { return stopped_; });
  }

  void stop() {
    {
      std::lock_guard lock(stop_mu_);
      if (stopped_) return;
      stopped_ = true;
    }
    server_.stop();
    if (thread_.joinable()) thread_.join();
    if (on_stop_) on_stop_();
    stop_cv_.notify_all();
  }

 private:
  static void send(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }
  static void ok(httplib::Response& res, Json data, int status = 200) {
    send(res, status, Json{{"data", std::move(data)}});
  }

  static Json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return Json::object();
    Json j = Json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw Error(ErrorCode::BadRequest, "body must be a JSON object");
    }
    return j;
  }

  static std::string field(const Json& body, const char* key) {
    auto it = body.find(key);
    if (it == body.end() || !it->is_string()) {
      throw Error(ErrorCode::BadRequest, std::string("missing string field '") + key + "'");
    }
    return it->get<std::string>();
  }

  static std::string user_of(const httplib::Request& req, const Json& body) {
    if (auto it = body.find("user"); it != body.end()) {
      if (!it->is_string()) throw Error(ErrorCode::BadRequest, "'user' must be a string");
      return it->get<std::string>();
    }
    std::string header = req.get_header_value("X-User-Id");
    if (header.empty()) throw Error(ErrorCode::BadRequest, "no user given");
    return header;
  }

  // Wraps a handler so domain errors become error bodies.
  template <typename F>
  httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const Error& e) {
        send(res, http_status(e.code()), error_body(e.code(), e.detail()));
      } catch (const nlohmann::json::exception& e) {
        send(res, 400, error_body(ErrorCode::BadRequest, e.what()));
      }
    };
  }

  Json item_json(const std::string& item_id, const std::string& viewer) const {
    std::optional<TrackRecord> rec = store_.item_record(item_id);
    Json j;
    if (rec) {
      j = to_json(*rec);
      j.erase("genres");
      j.erase("emotions");
      j.erase("instruments");
      j.erase("comments");
    } else {
      j["europeana_id"] = item_id;
    }
    if (!j.contains("audio_url")) j["audio_url"] = nullptr;
    Json annotations = Json::array();
    for (const Annotation& a : store_.annotations_for(item_id)) {
      Json aj = to_json(a);
      if (!viewer.empty()) {
        auto v = store_.vote_of(a.id, viewer);
        aj["my_vote"] = v ? Json(direction_name(*v)) : Json(nullptr);
      }
      annotations.push_back(std::move(aj));
    }
    j["annotations"] = std::move(annotations);
    Json comments = Json::array();
    for (const Comment& c : store_.comments_for(item_id)) comments.push_back(to_json(c));
    j["comments"] = std::move(comments);
    return j;
  }

  void routes() {
    server_.Get("/campaigns", guarded([this](const httplib::Request&, httplib::Response& res) {
      Json out = Json::array();
      for (const Campaign& c : store_.campaigns()) {
        Json j = to_json(c);
        j.erase("item_ids");
        j["item_count"] = c.item_ids.size();
        out.push_back(std::move(j));
      }
      ok(res, std::move(out));
    }));

    server_.Get(R"(/campaigns/([^/]+))",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  ok(res, to_json(store_.campaign(req.matches[1])));
                }));

    server_.Get(R"(/campaigns/([^/]+)/batches/([^/]+)/items)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  auto n = text::parse_int<std::size_t>(req.matches[2].str());
                  if (!n) throw Error(ErrorCode::BadRequest, "batch must be a number");
                  std::string viewer = req.get_header_value("X-User-Id");
                  Json out = Json::array();
                  for (const std::string& item : store_.batch(req.matches[1], *n)) {
                    out.push_back(item_json(item, viewer));
                  }
                  ok(res, std::move(out));
                }));

    server_.Get(R"(/campaigns/([^/]+)/leaderboard)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  Json out = Json::array();
                  std::size_t rank = 0;
                  for (const LeaderboardEntry& e : store_.leaderboard(req.matches[1])) {
                    out.push_back({{"rank", ++rank}, {"user", e.user}, {"points", e.points}});
                  }
                  ok(res, std::move(out));
                }));

    server_.Get(R"(/campaigns/([^/]+)/export)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  ok(res, to_json(store_.export_annotations(req.matches[1])));
                }));

    server_.Post(R"(/items/(.+)/annotations)",
                 guarded([this](const httplib::Request& req, httplib::Response& res) {
                   Json body = parse_body(req);
                   std::string cat = field(body, "category");
                   auto category = parse_category(cat);
                   if (!category) {
                     throw Error(ErrorCode::BadRequest, "unknown category '" + cat + "'");
                   }
                   Annotation a = store_.submit_annotation(
                       req.matches[1], field(body, "term_id"), *category, user_of(req, body));
                   ok(res, to_json(a), 201);
                 }));

    server_.Post(R"(/annotations/([^/]+)/votes)",
                 guarded([this](const httplib::Request& req, httplib::Response& res) {
                   Json body = parse_body(req);
                   std::string dir = field(body, "direction");
                   auto direction = parse_direction(dir);
                   if (!direction) {
                     throw Error(ErrorCode::BadRequest, "direction must be up or down");
                   }
                   std::string id = req.matches[1];
                   Tally t = store_.cast_vote(id, user_of(req, body), *direction);
                   ok(res, Json{{"annotation_id", id},
                                {"direction", direction_name(*direction)},
                                {"upvotes", t.upvotes},
                                {"downvotes", t.downvotes}});
                 }));

    server_.Post(R"(/items/(.+)/comments)",
                 guarded([this](const httplib::Request& req, httplib::Response& res) {
                   Json body = parse_body(req);
                   Comment c =
                       store_.add_comment(req.matches[1], user_of(req, body), field(body, "text"));
                   ok(res, to_json(c), 201);
                 }));

    server_.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
      if (!res.body.empty()) return;
      ErrorCode code = res.status == 404 ? ErrorCode::NotFound : ErrorCode::BadRequest;
      send(res, res.status, error_body(code, req.method + " " + req.path));
    });

    server_.set_exception_handler(
        [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
          std::string what = "internal error";
          try {
            std::rethrow_exception(ep);
          } catch (const std::exception& e) {
            what = e.what();
          } catch (...) {
          }
          send(res, 500, error_body(ErrorCode::WriteFailure, what));
        });
  }

  CampaignStore& store_;
  std::function<void()> on_stop_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
  std::mutex stop_mu_;
  std::condition_variable stop_cv_;
  bool stopped_ = false;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "data";
  std::optional<std::filesystem::path> vocabulary_file;
};

inline constexpr std::string_view kEventLogFile = "events.jsonl";

// A running service backed by DATA_DIR/events.jsonl.
class Service {
 public:
  explicit Service(const ServiceConfig& config) {
    std::error_code ec;
    std::filesystem::create_directories(config.data_dir, ec);
    if (ec) throw Error(ErrorCode::WriteFailure, config.data_dir.string() + ": " + ec.message());
    store_ = std::make_unique<PersistentStore>(config.data_dir / kEventLogFile,
                                               load_vocabularies(config.vocabulary_file));
    server_ = std::make_unique<ApiServer>(store_->store(), [this] { store_->flush(); });
    server_->bind(config.host, config.port);
    server_->start();
  }

  ~Service() { stop(); }

  int port() const { return server_->port(); }
  CampaignStore& store() { return store_->store(); }
  void wait() { server_->wait(); }
  void stop() {
    if (server_) server_->stop();
  }

 private:
  std::unique_ptr<PersistentStore> store_;
  std::unique_ptr<ApiServer> server_;
};

inline std::unique_ptr<Service> serve(const ServiceConfig& config) {
  return std::make_unique<Service>(config);
}

}  // namespace crowdkb
