#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "smellcheck/error.hpp"
#include "smellcheck/review_session.hpp"
#include "smellcheck/smell_kind.hpp"

namespace smellcheck {

inline constexpr int kCodebookSchemaVersion = 1;

enum class Stance { Accepting, Rejecting };

inline std::string_view to_string(Stance s) {
  return s == Stance::Accepting ? "accepting" : "rejecting";
}

inline std::optional<Stance> try_parse_stance(std::string_view s) {
  if (s == "accepting") return Stance::Accepting;
  if (s == "rejecting") return Stance::Rejecting;
  return std::nullopt;
}

inline Stance stance_of(Decision d) {
  return d == Decision::Accept ? Stance::Accepting : Stance::Rejecting;
}

struct HeuristicCode {
  std::string codeId;
  std::string label;
  SmellKind smell = SmellKind::DataClass;
  Stance stance = Stance::Accepting;
  std::vector<std::string> mergedFrom;
  std::optional<std::string> splitFrom;
  // set once a merge or split replaced this code
  std::vector<std::string> replacedBy;
  bool retired = false;
};

struct Codebook {
  std::vector<HeuristicCode> codes;
  int nextId = 1;

  const HeuristicCode* find(const std::string& id) const {
    for (const auto& c : codes) {
      if (c.codeId == id) return &c;
    }
    return nullptr;
  }
  HeuristicCode& require(const std::string& id) {
    for (auto& c : codes) {
      if (c.codeId == id) return c;
    }
    throw Error(ErrorCode::UnknownCode, "unknown code " + id);
  }
  const HeuristicCode& require(const std::string& id) const {
    return const_cast<Codebook*>(this)->require(id);
  }
  const HeuristicCode& require_active(const std::string& id) const {
    const auto& c = require(id);
    if (c.retired) throw Error(ErrorCode::UnknownCode, "code " + id + " was retired");
    return c;
  }
};

struct ArgumentRef {
  std::string sessionId;
  std::string candidateId;
  std::size_t index = 0;

  friend auto operator<=>(const ArgumentRef&, const ArgumentRef&) = default;
};

inline std::string add_code(Codebook& cb, std::string label, SmellKind smell,
                            Stance stance) {
  HeuristicCode c;
  c.codeId = "H" + std::to_string(cb.nextId++);
  c.label = std::move(label);
  c.smell = smell;
  c.stance = stance;
  cb.codes.push_back(c);
  return c.codeId;
}

namespace detail {

inline ReviewSession& session_for(std::span<ReviewSession> sessions,
                                  const std::string& id) {
  for (auto& s : sessions) {
    if (s.sessionId == id) return s;
  }
  throw Error(ErrorCode::UnknownSession, "unknown session " + id);
}

inline Argument& argument_at(ReviewSession& s, const ArgumentRef& ref) {
  auto it = s.verdicts.find(ref.candidateId);
  if (it == s.verdicts.end() || ref.index >= it->second.arguments.size()) {
    throw Error(ErrorCode::UnknownArgument,
                "no argument " + std::to_string(ref.index) + " on " + ref.candidateId +
                    " in session " + ref.sessionId);
  }
  return it->second.arguments[ref.index];
}

// Visits every tag instance: (session, candidate, arg index, position in codes).
template <typename Fn>
void for_each_tag(std::span<ReviewSession> sessions, Fn&& fn) {
  for (auto& s : sessions) {
    for (auto& [cid, v] : s.verdicts) {
      for (std::size_t i = 0; i < v.arguments.size(); ++i) {
        for (auto& code : v.arguments[i].codes) {
          fn(ArgumentRef{s.sessionId, cid, i}, code);
        }
      }
    }
  }
}

}  // namespace detail

/// Tags one argument with a code. The code's smell and stance must agree
/// with the candidate and the verdict the argument justifies.
inline void code_argument(const Codebook& cb, ReviewSession& session,
                          const ArgumentRef& ref, const std::string& code_id) {
  const auto& code = cb.require_active(code_id);
  if (ref.sessionId != session.sessionId) {
    throw Error(ErrorCode::UnknownSession, "argument belongs to session " + ref.sessionId);
  }
  const auto& entry = session.require(ref.candidateId);
  Argument& arg = detail::argument_at(session, ref);
  const Verdict& v = session.verdicts.at(ref.candidateId);
  if (arg.discarded) {
    throw Error(ErrorCode::DiscardedArgument, "discarded arguments take no codes");
  }
  if (code.smell != entry.smell) {
    throw Error(ErrorCode::SmellMismatch, code_id + " is a " +
                                              std::string(display_name(code.smell)) +
                                              " code");
  }
  if (v.decision == Decision::Skip || stance_of(v.decision) != code.stance) {
    throw Error(ErrorCode::StanceMismatch,
                code_id + " is " + std::string(to_string(code.stance)) +
                    " but the verdict is " + std::string(to_string(v.decision)));
  }
  if (std::find(arg.codes.begin(), arg.codes.end(), code_id) == arg.codes.end()) {
    arg.codes.push_back(code_id);
  }
}

/// Folds several codes into a new one. Every tag instance is rewritten, so
/// an argument tagged with two of the merged codes keeps two tags and the
/// merged frequency is the sum of the parts.
inline std::string merge_codes(Codebook& cb, std::span<ReviewSession> sessions,
                               const std::vector<std::string>& ids,
                               const std::string& new_label) {
  std::set<std::string> unique(ids.begin(), ids.end());
  if (unique.size() < 2) {
    throw Error(ErrorCode::UnknownCode, "merge needs at least two distinct codes");
  }
  const auto& first = cb.require_active(*unique.begin());
  const SmellKind smell = first.smell;
  const Stance stance = first.stance;
  for (const auto& id : unique) {
    const auto& c = cb.require_active(id);
    if (c.stance != stance) {
      throw Error(ErrorCode::MixedStanceMerge, "cannot merge accepting and rejecting codes");
    }
    if (c.smell != smell) {
      throw Error(ErrorCode::MixedSmellMerge, "cannot merge codes of different smells");
    }
  }
  const std::string merged = add_code(cb, new_label, smell, stance);
  cb.require(merged).mergedFrom = {unique.begin(), unique.end()};
  for (const auto& id : unique) {
    auto& c = cb.require(id);
    c.retired = true;
    c.replacedBy = {merged};
  }
  detail::for_each_tag(sessions, [&](const ArgumentRef&, std::string& code) {
    if (unique.count(code)) code = merged;
  });
  return merged;
}

/// Replaces one code by several. `assignment` sends a tagged argument to a
/// label index; arguments left out go to the first label.
inline std::vector<std::string> split_code(Codebook& cb, std::span<ReviewSession> sessions,
                                           const std::string& id,
                                           const std::vector<std::string>& labels,
                                           const std::map<ArgumentRef, std::size_t>& assignment = {}) {
  if (labels.size() < 2) {
    throw Error(ErrorCode::UnknownCode, "split needs at least two labels");
  }
  const auto& old = cb.require_active(id);
  const SmellKind smell = old.smell;
  const Stance stance = old.stance;
  for (const auto& [ref, index] : assignment) {
    if (index >= labels.size()) {
      throw Error(ErrorCode::UnknownCode, "split target " + std::to_string(index) +
                                              " out of range");
    }
  }
  std::vector<std::string> parts;
  for (const auto& label : labels) {
    parts.push_back(add_code(cb, label, smell, stance));
    cb.require(parts.back()).splitFrom = id;
  }
  auto& retired = cb.require(id);
  retired.retired = true;
  retired.replacedBy = parts;
  detail::for_each_tag(sessions, [&](const ArgumentRef& ref, std::string& code) {
    if (code != id) return;
    auto it = assignment.find(ref);
    code = parts[it == assignment.end() ? 0 : it->second];
  });
  return parts;
}

struct FrequencyRow {
  std::string codeId;
  std::string label;
  std::size_t f = 0;

  friend bool operator==(const FrequencyRow&, const FrequencyRow&) = default;
};

struct FrequencyTable {
  SmellKind smell = SmellKind::DataClass;
  std::vector<FrequencyRow> accepting;
  std::vector<FrequencyRow> rejecting;
  std::size_t acceptingTotal = 0;
  std::size_t rejectingTotal = 0;
};

/// Tag instances on non-discarded arguments, per active code of `smell`.
inline std::map<std::string, std::size_t> code_frequencies(const Codebook& cb,
                                                           std::span<const ReviewSession> sessions,
                                                           SmellKind smell) {
  std::map<std::string, std::size_t> f;
  for (const auto& s : sessions) {
    for (const auto& [cid, v] : s.verdicts) {
      for (const auto& a : v.arguments) {
        if (a.discarded) continue;
        for (const auto& code : a.codes) {
          const auto* c = cb.find(code);
          if (c && !c->retired && c->smell == smell) ++f[code];
        }
      }
    }
  }
  return f;
}

inline FrequencyTable frequency_table(const Codebook& cb,
                                      std::span<const ReviewSession> sessions,
                                      SmellKind smell) {
  FrequencyTable t;
  t.smell = smell;
  for (const auto& [id, n] : code_frequencies(cb, sessions, smell)) {
    const auto& c = cb.require(id);
    FrequencyRow row{id, c.label, n};
    if (c.stance == Stance::Accepting) {
      t.accepting.push_back(row);
      t.acceptingTotal += n;
    } else {
      t.rejecting.push_back(row);
      t.rejectingTotal += n;
    }
  }
  auto order = [](const FrequencyRow& a, const FrequencyRow& b) {
    if (a.f != b.f) return a.f > b.f;
    if (a.label != b.label) return a.label < b.label;
    return a.codeId < b.codeId;
  };
  std::sort(t.accepting.begin(), t.accepting.end(), order);
  std::sort(t.rejecting.begin(), t.rejecting.end(), order);
  return t;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string frequency_table_csv(const FrequencyTable& t) {
  std::ostringstream out;
  out << "smell,stance,code,label,f\n";
  auto rows = [&](const std::vector<FrequencyRow>& rs, Stance stance, std::size_t total) {
    for (const auto& r : rs) {
      out << to_string(t.smell) << ',' << to_string(stance) << ',' << r.codeId << ','
          << csv_field(r.label) << ',' << r.f << '\n';
    }
    out << to_string(t.smell) << ',' << to_string(stance) << ",,Total," << total << '\n';
  };
  rows(t.accepting, Stance::Accepting, t.acceptingTotal);
  rows(t.rejecting, Stance::Rejecting, t.rejectingTotal);
  return out.str();
}

inline nlohmann::json frequency_table_to_json(const FrequencyTable& t) {
  auto rows = [](const std::vector<FrequencyRow>& rs) {
    auto a = nlohmann::json::array();
    for (const auto& r : rs) a.push_back({{"codeId", r.codeId}, {"label", r.label}, {"f", r.f}});
    return a;
  };
  return {{"smell", to_string(t.smell)},
          {"accepting", rows(t.accepting)},
          {"rejecting", rows(t.rejecting)},
          {"acceptingTotal", t.acceptingTotal},
          {"rejectingTotal", t.rejectingTotal}};
}

inline nlohmann::json codebook_to_json(const Codebook& cb) {
  auto codes = nlohmann::json::array();
  for (const auto& c : cb.codes) {
    codes.push_back({{"codeId", c.codeId},
                     {"label", c.label},
                     {"smell", to_string(c.smell)},
                     {"stance", to_string(c.stance)},
                     {"mergedFrom", c.mergedFrom},
                     {"splitFrom", c.splitFrom ? nlohmann::json(*c.splitFrom) : nullptr},
                     {"replacedBy", c.replacedBy},
                     {"retired", c.retired}});
  }
  return {{"schemaVersion", kCodebookSchemaVersion},
          {"nextId", cb.nextId},
          {"codes", std::move(codes)}};
}

inline Codebook codebook_from_json(const nlohmann::json& j) {
  Codebook cb;
  try {
    if (j.at("schemaVersion").get<int>() != kCodebookSchemaVersion) {
      throw Error(ErrorCode::SchemaViolation, "codebook: unsupported schemaVersion");
    }
    cb.nextId = j.at("nextId").get<int>();
    for (const auto& c : j.at("codes")) {
      HeuristicCode code;
      code.codeId = c.at("codeId").get<std::string>();
      code.label = c.at("label").get<std::string>();
      auto smell = try_parse_smell(c.at("smell").get<std::string>());
      auto stance = try_parse_stance(c.at("stance").get<std::string>());
      if (!smell || !stance) {
        throw Error(ErrorCode::SchemaViolation, "codebook: bad smell or stance on " + code.codeId);
      }
      code.smell = *smell;
      code.stance = *stance;
      code.mergedFrom = c.at("mergedFrom").get<std::vector<std::string>>();
      if (!c.at("splitFrom").is_null()) code.splitFrom = c.at("splitFrom").get<std::string>();
      code.replacedBy = c.at("replacedBy").get<std::vector<std::string>>();
      code.retired = c.at("retired").get<bool>();
      if (cb.find(code.codeId)) {
        throw Error(ErrorCode::SchemaViolation, "codebook: duplicate code " + code.codeId);
      }
      cb.codes.push_back(std::move(code));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("codebook: ") + e.what());
  }
  return cb;
}

}  // namespace smellcheck
