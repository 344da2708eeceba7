#pragma once

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "smellcheck/catalog.hpp"
#include "smellcheck/error.hpp"
#include "smellcheck/hash.hpp"
#include "smellcheck/smell_kind.hpp"

namespace smellcheck {

inline constexpr int kSessionSchemaVersion = 1;

enum class Decision { Accept, Reject, Skip };

inline std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::Accept: return "accept";
    case Decision::Reject: return "reject";
    case Decision::Skip: return "skip";
  }
  return "skip";
}

inline std::optional<Decision> try_parse_decision(std::string_view s) {
  if (s == "accept") return Decision::Accept;
  if (s == "reject") return Decision::Reject;
  if (s == "skip") return Decision::Skip;
  return std::nullopt;
}

enum class ItemResponse { Yes, No, Unsure };

inline std::string_view to_string(ItemResponse r) {
  switch (r) {
    case ItemResponse::Yes: return "yes";
    case ItemResponse::No: return "no";
    case ItemResponse::Unsure: return "unsure";
  }
  return "unsure";
}

inline std::optional<ItemResponse> try_parse_response(std::string_view s) {
  if (s == "yes") return ItemResponse::Yes;
  if (s == "no") return ItemResponse::No;
  if (s == "unsure") return ItemResponse::Unsure;
  return std::nullopt;
}

struct Argument {
  std::string text;
  std::vector<std::string> codes;
  bool discarded = false;

  friend bool operator==(const Argument&, const Argument&) = default;
};

struct Verdict {
  Decision decision = Decision::Skip;
  std::vector<Argument> arguments;
  bool unjustified = false;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct CandidateEntry {
  std::string id;
  SmellKind smell = SmellKind::DataClass;

  friend bool operator==(const CandidateEntry&, const CandidateEntry&) = default;
};

struct HistoryEntry {
  std::string candidateId;
  Decision decision = Decision::Skip;
  std::size_t argumentCount = 0;
  bool unjustified = false;
  std::string idempotencyKey;
  std::string at;

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

using Clock = std::function<std::string()>;

inline std::string utc_now() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct ReviewSession {
  std::string sessionId;
  std::string reviewerId;
  std::vector<CandidateEntry> candidates;
  std::map<std::pair<std::string, std::string>, ItemResponse> answers;
  std::map<std::string, Verdict> verdicts;
  std::vector<HistoryEntry> history;
  std::string createdAt;
  std::string updatedAt;

  const CandidateEntry* find(const std::string& candidate_id) const {
    for (const auto& c : candidates) {
      if (c.id == candidate_id) return &c;
    }
    return nullptr;
  }

  const CandidateEntry& require(const std::string& candidate_id) const {
    if (const auto* c = find(candidate_id)) return *c;
    throw Error(ErrorCode::UnknownCandidate,
                "candidate " + candidate_id + " is not part of session " + sessionId);
  }

  std::size_t history_count(const std::string& candidate_id) const {
    return static_cast<std::size_t>(
        std::count_if(history.begin(), history.end(),
                      [&](const HistoryEntry& h) { return h.candidateId == candidate_id; }));
  }
};

/// Duplicate candidate ids collapse to their first occurrence; each one
/// dropped is reported through `warnings`.
inline ReviewSession create_session(const std::vector<CandidateEntry>& candidates,
                                    const std::string& reviewer_id,
                                    std::vector<std::string>* warnings = nullptr,
                                    const Clock& clock = utc_now,
                                    std::string session_id = {}) {
  if (candidates.empty()) {
    throw Error(ErrorCode::InvalidCandidate, "a session needs at least one candidate");
  }
  ReviewSession s;
  s.reviewerId = reviewer_id;
  std::set<std::string> seen;
  for (const auto& c : candidates) {
    if (!seen.insert(c.id).second) {
      if (warnings) warnings->push_back("duplicate candidate " + c.id + " ignored");
      continue;
    }
    s.candidates.push_back(c);
  }
  s.createdAt = s.updatedAt = clock();
  if (session_id.empty()) {
    Fnv1a h;
    h.field(reviewer_id).field(s.createdAt);
    for (const auto& c : s.candidates) h.field(c.id);
    session_id = "s-" + h.hex().substr(0, 12);
  }
  s.sessionId = std::move(session_id);
  return s;
}

inline std::vector<CandidateEntry> entries_of(const std::vector<SmellCandidate>& cs) {
  std::vector<CandidateEntry> out;
  for (const auto& c : cs) out.push_back({c.id(), c.smell()});
  return out;
}

inline void record_answer(ReviewSession& s, const std::string& candidate_id,
                          const std::string& item_id, ItemResponse response,
                          const Clock& clock = utc_now) {
  const auto& entry = s.require(candidate_id);
  const auto& item = find_item(item_id);
  if (item.smell != entry.smell) {
    throw Error(ErrorCode::UnknownItem, item_id + " does not apply to a " +
                                            std::string(display_name(entry.smell)) +
                                            " candidate");
  }
  s.answers[{candidate_id, item_id}] = response;
  s.updatedAt = clock();
}

/// Stores a verdict, replacing any earlier one. Returns false when the
/// idempotency key was already applied to this candidate (nothing changes).
inline bool record_verdict(ReviewSession& s, const std::string& candidate_id,
                           Decision decision, std::vector<Argument> arguments,
                           bool unjustified = false,
                           const std::string& idempotency_key = {},
                           const Clock& clock = utc_now) {
  s.require(candidate_id);
  if (!idempotency_key.empty()) {
    for (const auto& h : s.history) {
      if (h.candidateId == candidate_id && h.idempotencyKey == idempotency_key) {
        return false;
      }
    }
  }
  if (decision != Decision::Skip && arguments.empty() && !unjustified) {
    throw Error(ErrorCode::MissingArguments,
                "accept and reject need at least one argument or the unjustified flag");
  }
  for (const auto& a : arguments) {
    if (a.discarded && !a.codes.empty()) {
      throw Error(ErrorCode::SchemaViolation, "a discarded argument cannot carry codes");
    }
  }
  const std::string at = clock();
  s.history.push_back({candidate_id, decision, arguments.size(), unjustified,
                       idempotency_key, at});
  s.verdicts[candidate_id] = Verdict{decision, std::move(arguments), unjustified};
  s.updatedAt = at;
  return true;
}

/// Curator action: the argument stops counting and loses its codes.
inline void discard_argument(ReviewSession& s, const std::string& candidate_id,
                             std::size_t index, const Clock& clock = utc_now) {
  s.require(candidate_id);
  auto it = s.verdicts.find(candidate_id);
  if (it == s.verdicts.end() || index >= it->second.arguments.size()) {
    throw Error(ErrorCode::UnknownArgument, "no argument " + std::to_string(index) +
                                                " on candidate " + candidate_id);
  }
  auto& arg = it->second.arguments[index];
  arg.discarded = true;
  arg.codes.clear();
  s.updatedAt = clock();
}

inline std::optional<std::string> next_pending(const ReviewSession& s) {
  for (const auto& c : s.candidates) {
    if (!s.verdicts.count(c.id)) return c.id;
  }
  return std::nullopt;
}

// ---- persistence -------------------------------------------------------

inline nlohmann::json session_to_json(const ReviewSession& s) {
  using nlohmann::json;
  json j;
  j["schemaVersion"] = kSessionSchemaVersion;
  j["sessionId"] = s.sessionId;
  j["reviewerId"] = s.reviewerId;
  j["createdAt"] = s.createdAt;
  j["updatedAt"] = s.updatedAt;
  auto cands = json::array();
  for (const auto& c : s.candidates) {
    cands.push_back({{"id", c.id}, {"smell", to_string(c.smell)}});
  }
  j["candidates"] = std::move(cands);
  auto answers = json::array();
  for (const auto& [key, r] : s.answers) {
    answers.push_back(
        {{"candidateId", key.first}, {"itemId", key.second}, {"answer", to_string(r)}});
  }
  j["answers"] = std::move(answers);
  json verdicts = json::object();
  for (const auto& [cid, v] : s.verdicts) {
    auto args = json::array();
    for (const auto& a : v.arguments) {
      args.push_back({{"text", a.text}, {"codes", a.codes}, {"discarded", a.discarded}});
    }
    verdicts[cid] = {{"decision", to_string(v.decision)},
                     {"unjustified", v.unjustified},
                     {"arguments", std::move(args)}};
  }
  j["verdicts"] = std::move(verdicts);
  auto history = json::array();
  for (const auto& h : s.history) {
    history.push_back({{"candidateId", h.candidateId},
                       {"decision", to_string(h.decision)},
                       {"argumentCount", h.argumentCount},
                       {"unjustified", h.unjustified},
                       {"idempotencyKey", h.idempotencyKey},
                       {"at", h.at}});
  }
  j["history"] = std::move(history);
  return j;
}

namespace detail {

[[noreturn]] inline void bad_session(const std::string& what) {
  throw Error(ErrorCode::SchemaViolation, "session: " + what);
}

inline Decision decision_field(const nlohmann::json& j) {
  auto d = try_parse_decision(j.at("decision").get<std::string>());
  if (!d) bad_session("unknown decision " + j.at("decision").dump());
  return *d;
}

}  // namespace detail

inline ReviewSession session_from_json(const nlohmann::json& j) {
  ReviewSession s;
  try {
    if (j.at("schemaVersion").get<int>() != kSessionSchemaVersion) {
      detail::bad_session("unsupported schemaVersion " + j.at("schemaVersion").dump());
    }
    s.sessionId = j.at("sessionId").get<std::string>();
    s.reviewerId = j.at("reviewerId").get<std::string>();
    s.createdAt = j.at("createdAt").get<std::string>();
    s.updatedAt = j.at("updatedAt").get<std::string>();
    std::set<std::string> ids;
    for (const auto& c : j.at("candidates")) {
      auto smell = try_parse_smell(c.at("smell").get<std::string>());
      if (!smell) detail::bad_session("unknown smell " + c.at("smell").dump());
      CandidateEntry e{c.at("id").get<std::string>(), *smell};
      if (!ids.insert(e.id).second) detail::bad_session("duplicate candidate " + e.id);
      s.candidates.push_back(std::move(e));
    }
    for (const auto& a : j.at("answers")) {
      const auto cid = a.at("candidateId").get<std::string>();
      const auto item_id = a.at("itemId").get<std::string>();
      const auto* entry = s.find(cid);
      if (!entry) detail::bad_session("answer for unknown candidate " + cid);
      bool valid_item = false;
      for (const auto& item : items_for(entry->smell)) valid_item |= item.id == item_id;
      if (!valid_item) detail::bad_session("item " + item_id + " does not fit " + cid);
      auto r = try_parse_response(a.at("answer").get<std::string>());
      if (!r) detail::bad_session("unknown answer " + a.at("answer").dump());
      s.answers[{cid, item_id}] = *r;
    }
    for (const auto& [cid, v] : j.at("verdicts").items()) {
      if (!s.find(cid)) detail::bad_session("verdict for unknown candidate " + cid);
      Verdict verdict;
      verdict.decision = detail::decision_field(v);
      verdict.unjustified = v.at("unjustified").get<bool>();
      for (const auto& a : v.at("arguments")) {
        Argument arg{a.at("text").get<std::string>(),
                     a.at("codes").get<std::vector<std::string>>(),
                     a.at("discarded").get<bool>()};
        if (arg.discarded && !arg.codes.empty()) {
          detail::bad_session("discarded argument with codes on " + cid);
        }
        verdict.arguments.push_back(std::move(arg));
      }
      s.verdicts[cid] = std::move(verdict);
    }
    for (const auto& h : j.at("history")) {
      s.history.push_back({h.at("candidateId").get<std::string>(),
                           detail::decision_field(h),
                           h.at("argumentCount").get<std::size_t>(),
                           h.at("unjustified").get<bool>(),
                           h.at("idempotencyKey").get<std::string>(),
                           h.at("at").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    detail::bad_session(e.what());
  }
  return s;
}

inline std::string session_to_string(const ReviewSession& s) {
  return session_to_json(s).dump(2) + "\n";
}

/// Hash of the session content with timestamps left out.
inline std::string session_fingerprint(const ReviewSession& s) {
  auto j = session_to_json(s);
  j.erase("createdAt");
  j.erase("updatedAt");
  for (auto& h : j["history"]) h.erase("at");
  return Fnv1a().bytes(j.dump()).hex();
}

/// Writes through a temporary file and rename so a crash never leaves a
/// half-written file behind.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& data) {
  auto tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid());
  std::FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
  const bool ok = std::fwrite(data.data(), 1, data.size(), f) == data.size() &&
                  std::fflush(f) == 0 && ::fsync(fileno(f)) == 0;
  std::fclose(f);
  std::error_code ec;
  if (!ok) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::Io, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::Io, "cannot replace " + path.string());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::SchemaViolation, path.string() + ": " + e.what());
  }
}

inline void save_session(const ReviewSession& s, const std::filesystem::path& path) {
  write_file_atomic(path, session_to_string(s));
}

inline ReviewSession load_session(const std::filesystem::path& path) {
  return session_from_json(read_json_file(path));
}

}  // namespace smellcheck
