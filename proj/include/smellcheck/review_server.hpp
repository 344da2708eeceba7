#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "smellcheck/agreement.hpp"
#include "smellcheck/catalog.hpp"
#include "smellcheck/detector.hpp"
#include "smellcheck/review_session.hpp"
#include "smellcheck/workspace.hpp"

namespace smellcheck {

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

inline ApiResponse api_error(int status, std::string_view code, const std::string& message) {
  return {status, {{"code", code}, {"message", message}}};
}

inline int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownCandidate:
    case ErrorCode::UnknownSession:
    case ErrorCode::UnknownType:
    case ErrorCode::UnknownMethod:
      return 404;
    case ErrorCode::SessionConflict:
    case ErrorCode::DisjointCandidateSets:
    case ErrorCode::InsufficientSessions:
    case ErrorCode::EntityVanished:
      return 409;
    case ErrorCode::Io:
      return 500;
    default:
      return 422;
  }
}

/// The review API without the transport: every handler takes parsed input
/// and returns a status plus JSON body, so it can be driven in-process.
class ReviewService {
 public:
  ReviewService(CandidateFile file, ProjectModel model, std::filesystem::path session_dir,
                Clock clock = utc_now)
      : file_(std::move(file)),
        model_(std::move(model)),
        dir_(std::move(session_dir)),
        clock_(std::move(clock)) {
    std::filesystem::create_directories(dir_);
    for (const auto& c : file_.candidates) by_id_.emplace(c.id(), &c);
    sources_.insert(file_.sources.begin(), file_.sources.end());
  }

  const CandidateFile& candidates() const { return file_; }

  ApiResponse list_candidates() const {
    auto arr = nlohmann::json::array();
    for (const auto& c : file_.candidates) arr.push_back(candidate_to_json(c));
    return {200, std::move(arr)};
  }

  ApiResponse get_candidate(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) return api_error(404, "unknown_candidate", "no candidate " + id);
    const SmellCandidate& c = *it->second;
    nlohmann::json items = nlohmann::json::array();
    bool stale = false;
    for (const auto& item : items_for(c.smell())) {
      auto j = item_to_json(item);
      try {
        j["evidence"] = evidence_to_json(evaluate_evidence(model_, c, item, file_.config));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::EntityVanished) throw;
        stale = true;
        j["evidence"] = nullptr;
      }
      items.push_back(std::move(j));
    }
    return {200,
            {{"candidate", candidate_to_json(c)},
             {"explanation", explain(c)},
             {"stale", stale},
             {"items", std::move(items)}}};
  }

  ApiResponse get_source(const std::string& path, long from, long to) const {
    if (!sources_.count(path)) return api_error(404, "unknown_source", "not a scanned file: " + path);
    if (from < 1 || to < from) {
      return api_error(422, "schema_violation", "need 1 <= from <= to");
    }
    auto lines = source_lines(path, static_cast<std::size_t>(from), static_cast<std::size_t>(to));
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < lines.size(); ++i) {
      arr.push_back({{"n", static_cast<std::size_t>(from) + i}, {"text", lines[i]}});
    }
    return {200, {{"path", path}, {"from", from}, {"to", to}, {"lines", std::move(arr)}}};
  }

  ApiResponse catalog() const { return {200, catalog_to_json()}; }

  /// Body: {"reviewerId": str, "candidateIds": [str]?}; all candidates by default.
  ApiResponse create(const nlohmann::json& body) {
    if (!body.is_object() || !body.contains("reviewerId") || !body["reviewerId"].is_string() ||
        body["reviewerId"].get<std::string>().empty()) {
      return api_error(422, "schema_violation", "reviewerId must be a non-empty string");
    }
    std::vector<CandidateEntry> entries;
    if (body.contains("candidateIds")) {
      if (!body["candidateIds"].is_array()) {
        return api_error(422, "schema_violation", "candidateIds must be an array");
      }
      for (const auto& id : body["candidateIds"]) {
        if (!id.is_string()) return api_error(422, "schema_violation", "candidate ids are strings");
        auto it = by_id_.find(id.get<std::string>());
        if (it == by_id_.end()) {
          return api_error(404, "unknown_candidate", "no candidate " + id.get<std::string>());
        }
        entries.push_back({it->first, it->second->smell()});
      }
    } else {
      entries = entries_of(file_.candidates);
    }
    if (entries.empty()) return api_error(422, "schema_violation", "no candidates to review");
    std::vector<std::string> warnings;
    ReviewSession s = create_session(entries, body["reviewerId"].get<std::string>(), &warnings,
                                     clock_);
    // ids are content hashes; a second session in the same second gets a suffix
    std::string base = s.sessionId;
    for (int n = 2; std::filesystem::exists(path_of(s.sessionId)); ++n) {
      s.sessionId = base + "-" + std::to_string(n);
    }
    std::lock_guard lock(lock_for(s.sessionId));
    persist(s);
    auto j = session_to_json(s);
    j["warnings"] = warnings;
    return {201, std::move(j)};
  }

  ApiResponse get_session(const std::string& id) {
    return guarded(id, [&](ReviewSession& s) -> ApiResponse {
      return {200, session_to_json(s)};
    }, false);
  }

  /// Body: {"candidateId", "itemId", "answer": yes|no|unsure}.
  ApiResponse post_answer(const std::string& id, const nlohmann::json& body) {
    return guarded(id, [&](ReviewSession& s) -> ApiResponse {
      if (!body.is_object() || !body.contains("candidateId") || !body.contains("itemId") ||
          !body.contains("answer") || !body["candidateId"].is_string() ||
          !body["itemId"].is_string() || !body["answer"].is_string()) {
        return api_error(422, "schema_violation", "need candidateId, itemId and answer strings");
      }
      auto r = try_parse_response(body["answer"].get<std::string>());
      if (!r) return api_error(422, "schema_violation", "answer must be yes, no or unsure");
      record_answer(s, body["candidateId"].get<std::string>(), body["itemId"].get<std::string>(),
                    *r, clock_);
      persist(s);
      return {200, session_to_json(s)};
    });
  }

  /// Body: {"candidateId", "decision", "arguments": [str | {"text"}],
  ///        "unjustified"?: bool, "idempotencyKey"?: str}.
  ApiResponse post_verdict(const std::string& id, const nlohmann::json& body) {
    return guarded(id, [&](ReviewSession& s) -> ApiResponse {
      if (!body.is_object() || !body.contains("candidateId") || !body["candidateId"].is_string() ||
          !body.contains("decision") || !body["decision"].is_string()) {
        return api_error(422, "schema_violation", "need candidateId and decision strings");
      }
      auto decision = try_parse_decision(body["decision"].get<std::string>());
      if (!decision) return api_error(422, "schema_violation", "decision must be accept, reject or skip");
      std::vector<Argument> args;
      if (body.contains("arguments")) {
        if (!body["arguments"].is_array()) {
          return api_error(422, "schema_violation", "arguments must be an array");
        }
        for (const auto& a : body["arguments"]) {
          std::string text;
          if (a.is_string()) {
            text = a.get<std::string>();
          } else if (a.is_object() && a.contains("text") && a["text"].is_string()) {
            text = a["text"].get<std::string>();
          } else {
            return api_error(422, "schema_violation", "an argument is a string or {text}");
          }
          if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
            return api_error(422, "schema_violation", "arguments must not be blank");
          }
          args.push_back({text, {}, false});
        }
      }
      const bool unjustified = body.value("unjustified", false);
      const std::string key = body.value("idempotencyKey", std::string{});
      const std::string cid = body["candidateId"].get<std::string>();
      const bool applied = record_verdict(s, cid, *decision, std::move(args), unjustified, key, clock_);
      if (applied) persist(s);
      auto j = session_to_json(s);
      j["applied"] = applied;
      return {200, std::move(j)};
    });
  }

  std::vector<ReviewSession> load_all() const {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir_)) {
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<ReviewSession> out;
    for (const auto& f : files) out.push_back(load_session(f));
    return out;
  }

  ApiResponse stats() const {
    return as_response([&]() -> ApiResponse {
      auto sessions = load_all();
      return {200, stats_to_json(session_stats(sessions))};
    });
  }

  ApiResponse agreement() const {
    return as_response([&]() -> ApiResponse {
      auto sessions = load_all();
      auto arr = nlohmann::json::array();
      for (const auto& r : agreement_reports(sessions)) arr.push_back(agreement_to_json(r));
      return {200, std::move(arr)};
    });
  }

  std::filesystem::path path_of(const std::string& id) const { return dir_ / (id + ".json"); }

 private:
  std::mutex& lock_for(const std::string& id) {
    std::lock_guard g(map_mutex_);
    auto& m = locks_[id];
    if (!m) m = std::make_unique<std::mutex>();
    return *m;
  }

  void persist(const ReviewSession& s) {
    const std::string bytes = session_to_string(s);
    write_file_atomic(path_of(s.sessionId), bytes);
    std::lock_guard g(map_mutex_);
    written_[s.sessionId] = bytes;
  }

  // Loads the session under its lock, refusing when the file on disk is not
  // what this service last wrote.
  template <typename Fn>
  ApiResponse guarded(const std::string& id, Fn&& fn, bool mutating = true) {
    if (id.empty() || id.find_first_of("/\\") != std::string::npos || id[0] == '.') {
      return api_error(404, "unknown_session", "no session " + id);
    }
    std::lock_guard lock(lock_for(id));
    const auto path = path_of(id);
    if (!std::filesystem::exists(path)) return api_error(404, "unknown_session", "no session " + id);
    const std::string bytes = read_file(path);
    if (mutating) {
      std::lock_guard g(map_mutex_);
      auto it = written_.find(id);
      if (it != written_.end() && it->second != bytes) {
        return api_error(409, "session_conflict",
                         "session " + id + " changed on disk; reload before writing");
      }
    }
    return as_response([&] {
      ReviewSession s = session_from_json(nlohmann::json::parse(bytes));
      return fn(s);
    });
  }

  template <typename Fn>
  static ApiResponse as_response(Fn&& fn) {
    try {
      return fn();
    } catch (const Error& e) {
      return api_error(http_status_for(e.code()), to_string(e.code()), e.what());
    }
  }

  CandidateFile file_;
  ProjectModel model_;
  std::filesystem::path dir_;
  Clock clock_;
  std::map<std::string, const SmellCandidate*> by_id_;
  std::set<std::string> sources_;
  std::mutex map_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> locks_;
  std::map<std::string, std::string> written_;
};

namespace detail {

inline void send(httplib::Response& res, const ApiResponse& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

inline std::optional<nlohmann::json> parse_body(const httplib::Request& req,
                                                httplib::Response& res) {
  try {
    return nlohmann::json::parse(req.body);
  } catch (const nlohmann::json::parse_error& e) {
    send(res, api_error(422, "schema_violation", std::string("body is not JSON: ") + e.what()));
    return std::nullopt;
  }
}

template <typename Fn>
void handle(httplib::Response& res, Fn&& fn) {
  try {
    send(res, fn());
  } catch (const Error& e) {
    send(res, api_error(http_status_for(e.code()), to_string(e.code()), e.what()));
  } catch (const std::exception& e) {
    send(res, api_error(500, "internal", e.what()));
  }
}

}  // namespace detail

/// Routes the service onto an httplib server; `static_dir` serves the UI.
inline void mount(httplib::Server& server, ReviewService& svc,
                  const std::optional<std::filesystem::path>& static_dir = std::nullopt) {
  using httplib::Request;
  using httplib::Response;
  using detail::handle;
  server.Get("/api/candidates", [&](const Request&, Response& res) {
    handle(res, [&] { return svc.list_candidates(); });
  });
  server.Get(R"(/api/candidates/([^/]+))", [&](const Request& req, Response& res) {
    handle(res, [&] { return svc.get_candidate(req.matches[1]); });
  });
  server.Get("/api/source", [&](const Request& req, Response& res) {
    handle(res, [&] {
      if (!req.has_param("path") || !req.has_param("from") || !req.has_param("to")) {
        return api_error(422, "schema_violation", "path, from and to are required");
      }
      long from = 0, to = 0;
      try {
        from = std::stol(req.get_param_value("from"));
        to = std::stol(req.get_param_value("to"));
      } catch (const std::exception&) {
        return api_error(422, "schema_violation", "from and to must be integers");
      }
      return svc.get_source(req.get_param_value("path"), from, to);
    });
  });
  server.Get("/api/catalog", [&](const Request&, Response& res) {
    handle(res, [&] { return svc.catalog(); });
  });
  server.Post("/api/sessions", [&](const Request& req, Response& res) {
    if (auto body = detail::parse_body(req, res)) handle(res, [&] { return svc.create(*body); });
  });
  server.Get(R"(/api/sessions/([^/]+))", [&](const Request& req, Response& res) {
    handle(res, [&] { return svc.get_session(req.matches[1]); });
  });
  server.Post(R"(/api/sessions/([^/]+)/answers)", [&](const Request& req, Response& res) {
    if (auto body = detail::parse_body(req, res)) {
      handle(res, [&] { return svc.post_answer(req.matches[1], *body); });
    }
  });
  server.Post(R"(/api/sessions/([^/]+)/verdicts)", [&](const Request& req, Response& res) {
    if (auto body = detail::parse_body(req, res)) {
      handle(res, [&] { return svc.post_verdict(req.matches[1], *body); });
    }
  });
  server.Get("/api/reports/stats", [&](const Request&, Response& res) {
    handle(res, [&] { return svc.stats(); });
  });
  server.Get("/api/reports/agreement", [&](const Request&, Response& res) {
    handle(res, [&] { return svc.agreement(); });
  });
  if (static_dir) server.set_mount_point("/", static_dir->string());
  // anything else under /api is an ApiError too, not httplib's empty 404
  server.set_error_handler([](const Request& req, Response& res) {
    if (res.body.empty()) {
      detail::send(res, api_error(res.status, res.status == 404 ? "not_found" : "http_error",
                                  req.method + " " + req.path));
    }
  });
}

}  // namespace smellcheck
