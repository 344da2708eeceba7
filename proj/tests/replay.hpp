#pragma once

// Builders that turn the JSON fixtures into sessions and codebooks.

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "smellcheck/smellcheck.hpp"

namespace replay {

using nlohmann::json;
using namespace smellcheck;

inline json load(const std::filesystem::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

inline std::string fixed_clock() { return "2024-01-01T00:00:00Z"; }

struct Coding {
  Codebook codebook;
  std::vector<ReviewSession> sessions;
};

inline const HeuristicCode* active_by_label(const Codebook& cb, const std::string& label) {
  for (const auto& c : cb.codes) {
    if (!c.retired && c.label == label) return &c;
  }
  return nullptr;
}

// Replays the first `tasks` tasks of the transcript: one session per
// reviewer, one code per distinct label, every argument tagged.
inline Coding transcript(const json& doc, std::size_t tasks = 3) {
  Coding out;
  const SmellKind smell = parse_smell(doc["smell"].get<std::string>());
  std::vector<CandidateEntry> entries;
  for (const auto& t : doc["tasks"]) entries.push_back({t["candidate"], smell});
  std::map<std::string, std::size_t> by_reviewer;
  for (int r = 1; r <= doc["reviewers"].get<int>(); ++r) {
    char name[8];
    std::snprintf(name, sizeof name, "R%02d", r);
    by_reviewer[name] = out.sessions.size();
    out.sessions.push_back(create_session(entries, name, nullptr, fixed_clock, "s-" + std::string(name)));
  }
  for (std::size_t t = 0; t < tasks && t < doc["tasks"].size(); ++t) {
    const auto& task = doc["tasks"][t];
    const std::string cid = task["candidate"];
    for (const auto& v : task["verdicts"]) {
      auto& s = out.sessions[by_reviewer.at(v["reviewer"])];
      const auto decision = *try_parse_decision(v["decision"].get<std::string>());
      std::vector<Argument> args;
      for (const auto& a : v["arguments"]) {
        args.push_back({a["text"], {}, a.value("discarded", false)});
      }
      record_verdict(s, cid, decision, args, false, {}, fixed_clock);
      for (std::size_t i = 0; i < v["arguments"].size(); ++i) {
        const auto& a = v["arguments"][i];
        if (!a.contains("code")) continue;
        const std::string label = a["code"];
        const auto* code = active_by_label(out.codebook, label);
        std::string id = code ? code->codeId
                              : add_code(out.codebook, label, smell, stance_of(decision));
        code_argument(out.codebook, s, {s.sessionId, cid, i}, id);
      }
    }
  }
  return out;
}

inline void refine(Coding& c, const json& doc) {
  for (const auto& step : doc["refinement"]) {
    if (step["op"] == "merge") {
      std::vector<std::string> ids;
      for (const auto& label : step["codes"]) {
        ids.push_back(active_by_label(c.codebook, label)->codeId);
      }
      merge_codes(c.codebook, c.sessions, ids, step["label"]);
    } else {
      const std::string label = step["code"];
      const std::string id = active_by_label(c.codebook, label)->codeId;
      std::map<ArgumentRef, std::size_t> assignment;
      for (const auto& task : doc["tasks"]) {
        for (const auto& v : task["verdicts"]) {
          for (std::size_t i = 0; i < v["arguments"].size(); ++i) {
            const auto& a = v["arguments"][i];
            if (a.value("code", "") == label && a.contains("splitTo")) {
              assignment[{"s-" + v["reviewer"].get<std::string>(), task["candidate"], i}] =
                  a["splitTo"].get<std::size_t>();
            }
          }
        }
      }
      split_code(c.codebook, c.sessions, id, step["labels"].get<std::vector<std::string>>(),
                 assignment);
    }
  }
}

inline std::vector<std::pair<std::string, std::size_t>> rows(const std::vector<FrequencyRow>& in) {
  std::vector<std::pair<std::string, std::size_t>> out;
  for (const auto& r : in) out.emplace_back(r.label, r.f);
  return out;
}

inline std::vector<std::pair<std::string, std::size_t>> rows(const json& in) {
  std::vector<std::pair<std::string, std::size_t>> out;
  for (const auto& r : in) out.emplace_back(r[0], r[1]);
  return out;
}

inline std::vector<CandidateEntry> numbered_candidates(std::size_t n, SmellKind smell) {
  std::vector<CandidateEntry> out;
  for (std::size_t i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "c%02zu", i + 1);
    out.push_back({id, smell});
  }
  return out;
}

// Sessions described by the argument bookkeeping fixture. Verdict kinds are
// dealt out over the reviewer x candidate grid in a fixed order.
inline std::vector<ReviewSession> argument_sessions(const json& doc) {
  const std::size_t reviewers = doc["reviewers"], candidates = doc["candidates"];
  auto entries = numbered_candidates(candidates, SmellKind::LongParameterList);
  struct Kind {
    Decision decision;
    int args;
    bool discarded;
    bool unjustified;
  };
  std::vector<Kind> deck;
  auto add = [&](std::size_t n, Kind k) { deck.insert(deck.end(), n, k); };
  add(doc["unjustifiedWithoutArguments"], {Decision::Accept, 0, false, true});
  add(doc["singleDiscardedArgument"], {Decision::Reject, 1, true, false});
  const std::size_t acc = doc["accepting"]["verdicts"], acc2 = doc["accepting"]["twoArgumentVerdicts"];
  const std::size_t rej = doc["rejecting"]["verdicts"], rej2 = doc["rejecting"]["twoArgumentVerdicts"];
  add(acc2, {Decision::Accept, 2, false, false});
  add(acc - acc2, {Decision::Accept, 1, false, false});
  add(rej2, {Decision::Reject, 2, false, false});
  add(rej - rej2, {Decision::Reject, 1, false, false});
  if (deck.size() != reviewers * candidates) throw std::logic_error("fixture does not fill the grid");

  std::vector<ReviewSession> out;
  std::size_t next = 0;
  for (std::size_t r = 0; r < reviewers; ++r) {
    auto s = create_session(entries, "reviewer-" + std::to_string(r + 1), nullptr, fixed_clock,
                            "s-stats-" + std::to_string(r + 1));
    for (const auto& c : entries) {
      // stride through the deck so every reviewer gets a mix
      const Kind& k = deck[(next * 7) % deck.size()];
      ++next;
      std::vector<Argument> args;
      for (int a = 0; a < k.args; ++a) {
        args.push_back({"argument " + std::to_string(a + 1), {}, k.discarded});
      }
      record_verdict(s, c.id, k.decision, args, k.unjustified, {}, fixed_clock);
    }
    out.push_back(std::move(s));
  }
  return out;
}

// Sessions whose verdicts realise a subjects x {accept, reject} count matrix.
inline std::vector<ReviewSession> sessions_from_counts(const std::vector<int>& accept_counts,
                                                       int raters) {
  auto entries = numbered_candidates(accept_counts.size(), SmellKind::GodClass);
  std::vector<ReviewSession> out;
  for (int r = 0; r < raters; ++r) {
    auto s = create_session(entries, "rater-" + std::to_string(r + 1), nullptr, fixed_clock,
                            "s-rater-" + std::to_string(r + 1));
    for (std::size_t i = 0; i < entries.size(); ++i) {
      // rotate who accepts so raters are not identical
      const bool accept = (r + static_cast<int>(i)) % raters < accept_counts[i];
      record_verdict(s, entries[i].id, accept ? Decision::Accept : Decision::Reject,
                     {{accept ? "large and busy" : "cohesive enough", {}, false}}, false, {},
                     fixed_clock);
    }
    out.push_back(std::move(s));
  }
  return out;
}

// Fleiss' kappa as an exact fraction, from integer sums only.
struct Ratio {
  long long num, den;
};
inline Ratio exact_kappa(const RatingMatrix& m) {
  const long long N = static_cast<long long>(m.size());
  long long n = 0;
  for (int x : m[0]) n += x;
  long long sq = 0;
  std::vector<long long> col(m[0].size(), 0);
  for (const auto& row : m) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      sq += static_cast<long long>(row[j]) * row[j];
      col[j] += row[j];
    }
  }
  long long c = 0;
  for (auto v : col) c += v * v;
  const long long a = sq - N * n, d1 = N * n * (n - 1), d2 = (N * n) * (N * n);
  return {a * d2 - c * d1, d1 * (d2 - c)};
}

}  // namespace replay
