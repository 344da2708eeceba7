#pragma once

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

using RatingMatrix = std::vector<std::vector<int>>;

/// Fleiss' kappa over a subjects x categories count matrix. nullopt when
/// chance agreement is 1 (every rating in one category) and kappa is
/// undefined.
inline std::optional<double> fleiss_kappa(const RatingMatrix& m) {
  if (m.empty() || m.front().empty()) {
    throw Error(ErrorCode::RaggedMatrix, "empty rating matrix");
  }
  const std::size_t k = m.front().size();
  long long n = -1;
  for (const auto& row : m) {
    if (row.size() != k) throw Error(ErrorCode::RaggedMatrix, "rows differ in category count");
    long long sum = 0;
    for (int x : row) {
      if (x < 0) throw Error(ErrorCode::RaggedMatrix, "negative rating count");
      sum += x;
    }
    if (n < 0) n = sum;
    if (sum != n) throw Error(ErrorCode::RaggedMatrix, "rows differ in rater count");
  }
  if (n < 2) throw Error(ErrorCode::RaggedMatrix, "kappa needs at least two raters");

  const double N = static_cast<double>(m.size());
  const double nn = static_cast<double>(n);
  std::vector<double> col(k, 0.0);
  double p_bar = 0;
  for (const auto& row : m) {
    double agree = 0;
    for (std::size_t j = 0; j < k; ++j) {
      col[j] += row[j];
      agree += static_cast<double>(row[j]) * (row[j] - 1);
    }
    p_bar += agree / (nn * (nn - 1));
  }
  p_bar /= N;
  double pe = 0;
  for (double c : col) {
    const double p = c / (N * nn);
    pe += p * p;
  }
  if (pe >= 1.0) return std::nullopt;
  return (p_bar - pe) / (1.0 - pe);
}

struct SessionStats {
  std::size_t validations = 0;
  std::size_t argumentsTotal = 0;
  std::size_t discarded = 0;
  std::size_t remaining = 0;
  double discardRatePct = 0;
  double acceptSharePct = 0;
  double rejectSharePct = 0;
};

/// An accept/reject verdict flagged unjustified with no argument text stands
/// for one discarded argument, like an evasive "it has a smell" answer.
inline SessionStats session_stats(std::span<const ReviewSession> sessions) {
  SessionStats st;
  std::size_t accepting = 0, rejecting = 0;
  for (const auto& s : sessions) {
    for (const auto& [cid, v] : s.verdicts) {
      if (v.decision == Decision::Skip) continue;
      ++st.validations;
      if (v.arguments.empty() && v.unjustified) {
        ++st.argumentsTotal;
        ++st.discarded;
        continue;
      }
      for (const auto& a : v.arguments) {
        ++st.argumentsTotal;
        if (a.discarded) {
          ++st.discarded;
        } else if (v.decision == Decision::Accept) {
          ++accepting;
        } else {
          ++rejecting;
        }
      }
    }
  }
  st.remaining = st.argumentsTotal - st.discarded;
  if (st.remaining > 0) {
    const double r = static_cast<double>(st.remaining);
    st.discardRatePct = 100.0 * static_cast<double>(st.discarded) / r;
    st.acceptSharePct = 100.0 * static_cast<double>(accepting) / r;
    st.rejectSharePct = 100.0 * static_cast<double>(rejecting) / r;
  }
  return st;
}

inline nlohmann::json stats_to_json(const SessionStats& st) {
  return {{"validations", st.validations},
          {"argumentsTotal", st.argumentsTotal},
          {"discarded", st.discarded},
          {"remaining", st.remaining},
          {"discardRatePct", st.discardRatePct},
          {"acceptSharePct", st.acceptSharePct},
          {"rejectSharePct", st.rejectSharePct}};
}

struct Ratings {
  std::vector<std::string> subjects;  // candidate ids, session order
  RatingMatrix matrix;                // columns: accept, reject
};

/// Candidates every session decided (skip excluded), optionally one smell.
inline Ratings build_ratings(std::span<const ReviewSession> sessions,
                             std::optional<SmellKind> smell = std::nullopt) {
  if (sessions.size() < 2) {
    throw Error(ErrorCode::InsufficientSessions, "agreement needs at least two sessions");
  }
  auto ids_of = [](const ReviewSession& s) {
    std::set<std::string> ids;
    for (const auto& c : s.candidates) ids.insert(c.id);
    return ids;
  };
  const auto reference = ids_of(sessions.front());
  for (const auto& s : sessions) {
    if (ids_of(s) != reference) {
      throw Error(ErrorCode::DisjointCandidateSets,
                  "session " + s.sessionId + " covers a different candidate set than " +
                      sessions.front().sessionId);
    }
  }
  Ratings r;
  for (const auto& c : sessions.front().candidates) {
    if (smell && c.smell != *smell) continue;
    std::vector<int> row(2, 0);
    bool complete = true;
    for (const auto& s : sessions) {
      auto it = s.verdicts.find(c.id);
      if (it == s.verdicts.end() || it->second.decision == Decision::Skip) {
        complete = false;
        break;
      }
      ++row[it->second.decision == Decision::Accept ? 0 : 1];
    }
    if (!complete) continue;
    r.subjects.push_back(c.id);
    r.matrix.push_back(std::move(row));
  }
  return r;
}

struct AgreementReport {
  std::optional<SmellKind> smell;  // nullopt: all smells
  std::size_t raters = 0;
  std::size_t subjects = 0;
  std::optional<double> kappa;
  std::map<std::string, double> categoryShares;
};

inline AgreementReport agreement_report(std::span<const ReviewSession> sessions,
                                        std::optional<SmellKind> smell = std::nullopt) {
  const Ratings r = build_ratings(sessions, smell);
  AgreementReport rep;
  rep.smell = smell;
  rep.raters = sessions.size();
  rep.subjects = r.subjects.size();
  if (r.matrix.empty()) return rep;
  rep.kappa = fleiss_kappa(r.matrix);
  double accept = 0, total = 0;
  for (const auto& row : r.matrix) {
    accept += row[0];
    total += row[0] + row[1];
  }
  rep.categoryShares["accept"] = accept / total;
  rep.categoryShares["reject"] = 1.0 - accept / total;
  return rep;
}

/// Overall report first, then one per smell present in the candidate set.
inline std::vector<AgreementReport> agreement_reports(std::span<const ReviewSession> sessions) {
  std::vector<AgreementReport> out{agreement_report(sessions)};
  std::set<SmellKind> present;
  for (const auto& c : sessions.front().candidates) present.insert(c.smell);
  for (auto smell : kAllSmells) {
    if (present.count(smell)) out.push_back(agreement_report(sessions, smell));
  }
  return out;
}

inline nlohmann::json agreement_to_json(const AgreementReport& r) {
  return {{"smell", r.smell ? nlohmann::json(to_string(*r.smell)) : nlohmann::json("all")},
          {"raters", r.raters},
          {"subjects", r.subjects},
          {"kappa", r.kappa ? nlohmann::json(*r.kappa) : nlohmann::json(nullptr)},
          {"categoryShares", r.categoryShares}};
}

inline std::string ratings_csv(const Ratings& r) {
  std::ostringstream out;
  out << "subject,accept,reject\n";
  for (std::size_t i = 0; i < r.subjects.size(); ++i) {
    out << r.subjects[i] << ',' << r.matrix[i][0] << ',' << r.matrix[i][1] << '\n';
  }
  return out.str();
}

}  // namespace smellcheck
