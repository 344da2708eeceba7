#pragma once

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "smellcheck/agreement.hpp"
#include "smellcheck/catalog.hpp"
#include "smellcheck/codebook.hpp"
#include "smellcheck/detector.hpp"
#include "smellcheck/model_io.hpp"
#include "smellcheck/review_server.hpp"
#include "smellcheck/review_session.hpp"
#include "smellcheck/workspace.hpp"

namespace smellcheck::cli {

enum Exit : int { kOk = 0, kInput = 2, kState = 3, kInternal = 4 };

inline constexpr const char* kConfigEnv = "SMELLCHECK_CONFIG";

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::DisjointCandidateSets:
    case ErrorCode::SessionConflict:
    case ErrorCode::EntityVanished:
      return kState;
    case ErrorCode::InheritanceCycle:
    case ErrorCode::DuplicateTypeName:
    case ErrorCode::Io:
    case ErrorCode::SchemaViolation:
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidCandidate:
    case ErrorCode::InsufficientSessions:
    case ErrorCode::UnknownSmellKind:
    case ErrorCode::UnknownCandidate:
    case ErrorCode::UnknownCode:
    case ErrorCode::UnknownSession:
    case ErrorCode::MissingArguments:
      return kInput;
    default:
      return kInternal;
  }
}

namespace detail {

inline DetectionConfig load_config(const std::string& flag) {
  std::string path = flag;
  if (path.empty()) {
    if (const char* env = std::getenv(kConfigEnv)) path = env;
  }
  if (path.empty()) return {};
  return config_from_json(read_json_file(path));
}

inline void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty() || out_path == "-") {
    out << text;
  } else {
    write_file_atomic(out_path, text);
  }
}

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

inline std::string pct(double v) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(2) << v;
  return o.str();
}

struct ScanArgs {
  std::vector<std::string> paths;
  std::string config, out, format = "text", dumpModel;
};

inline int scan(const ScanArgs& a, std::ostream& out, std::ostream& err) {
  const DetectionConfig cfg = load_config(a.config);
  const auto files = collect_java_files(a.paths);
  auto units = parse_files(files);
  for (const auto& u : units) {
    for (const auto& d : u.diagnostics) {
      err << "warning: " << u.path << ':' << d.line << ": " << d.message << '\n';
    }
  }
  const ProjectModel model = resolve_project(std::move(units));
  if (!a.dumpModel.empty()) write_file_atomic(a.dumpModel, model_to_json(model).dump(2) + "\n");
  CandidateFile file{cfg, files, detect(model, cfg)};
  const std::string json_text = candidates_to_json(file).dump(2) + "\n";
  if (a.format == "json") {
    emit(json_text, a.out, out);
    return kOk;
  }
  if (!a.out.empty()) write_file_atomic(a.out, json_text);
  for (const auto& c : file.candidates) {
    out << pad(c.file() + ":" + std::to_string(c.sourceSpan().first) + "-" +
                   std::to_string(c.sourceSpan().last),
               48)
        << ' ' << pad(std::string(to_string(c.smell())), 22) << ' ' << c.entity().id << '\n';
  }
  out << file.candidates.size() << " candidate(s) in " << files.size() << " file(s)\n";
  return kOk;
}

inline CandidateFile load_candidates(const std::string& path) {
  return candidates_from_json(read_json_file(path));
}

// Prompt and read one trimmed line; nullopt on end of input.
inline std::optional<std::string> ask(std::istream& in, std::ostream& out,
                                      const std::string& prompt) {
  out << prompt << std::flush;
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  auto b = line.find_first_not_of(" \t\r");
  auto e = line.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : line.substr(b, e - b + 1);
}

struct ReviewArgs {
  std::string candidates, session, reviewer;
  bool resume = false;
};

inline int review(const ReviewArgs& a, std::istream& in, std::ostream& out, std::ostream& err) {
  const CandidateFile file = load_candidates(a.candidates);
  if (file.candidates.empty()) {
    out << "no candidates to review\n";
    return kOk;
  }
  ReviewSession session;
  const bool exists = std::filesystem::exists(a.session);
  if (a.resume && !exists) {
    err << "error: no session to resume at " << a.session << '\n';
    return kInput;
  }
  if (exists) {
    session = load_session(a.session);
    std::set<std::string> want, have;
    for (const auto& c : file.candidates) want.insert(c.id());
    for (const auto& c : session.candidates) have.insert(c.id);
    if (want != have) {
      err << "error: session " << a.session << " was started on a different candidate set\n";
      return kState;
    }
    out << "resuming session " << session.sessionId << " (" << session.verdicts.size() << '/'
        << session.candidates.size() << " done)\n";
  } else {
    session = create_session(entries_of(file.candidates),
                             a.reviewer.empty() ? "reviewer" : a.reviewer);
    save_session(session, a.session);
  }

  std::optional<ProjectModel> model;
  try {
    model = load_project(file.sources);
  } catch (const Error& e) {
    err << "warning: sources unavailable, evidence disabled (" << e.what() << ")\n";
  }

  std::map<std::string, const SmellCandidate*> by_id;
  for (const auto& c : file.candidates) by_id[c.id()] = &c;
  auto quit = [&] {
    save_session(session, a.session);
    out << "\nsaved " << session.verdicts.size() << '/' << session.candidates.size()
        << " verdicts to " << a.session << '\n';
    return kOk;
  };

  while (auto next = next_pending(session)) {
    const SmellCandidate& c = *by_id.at(*next);
    out << "\n[" << session.verdicts.size() + 1 << '/' << session.candidates.size() << "] "
        << explain(c);
    try {
      const auto lines = source_lines(c.file(), c.sourceSpan().first, c.sourceSpan().last);
      for (std::size_t i = 0; i < lines.size(); ++i) {
        out << std::setw(5) << c.sourceSpan().first + i << " | " << lines[i] << '\n';
      }
    } catch (const Error&) {
      out << "  (source not readable)\n";
    }
    for (const auto& item : items_for(c.smell())) {
      out << "\n  " << item.id << "  " << item.text << '\n';
      if (model) {
        try {
          auto ev = evaluate_evidence(*model, c, item, file.config);
          if (ev.finding != Finding::HumanOnly) out << "      finding: " << to_string(ev.finding) << '\n';
          for (const auto& f : ev.facts) out << "      " << f.label << ": " << f.value << '\n';
        } catch (const Error& e) {
          out << "      (" << e.what() << ")\n";
        }
      }
      while (true) {
        auto ans = ask(in, out, "      answer [y/n/u, enter skips, q quits]: ");
        if (!ans || *ans == "q") {
          return quit();
        }
        if (ans->empty()) break;
        std::optional<ItemResponse> r;
        if (*ans == "y") r = ItemResponse::Yes;
        if (*ans == "n") r = ItemResponse::No;
        if (*ans == "u") r = ItemResponse::Unsure;
        if (!r) continue;
        record_answer(session, c.id(), std::string(item.id), *r);
        break;
      }
    }
    std::optional<Decision> decision;
    while (!decision) {
      auto v = ask(in, out, "\n  verdict [a]ccept/[r]eject/[s]kip/[q]uit: ");
      if (!v || *v == "q") {
        return quit();
      }
      if (*v == "a") decision = Decision::Accept;
      if (*v == "r") decision = Decision::Reject;
      if (*v == "s") decision = Decision::Skip;
    }
    std::vector<Argument> args;
    bool unjustified = false;
    while (true) {
      auto t = ask(in, out, "  argument (empty line ends): ");
      if (!t) {
        return quit();
      }
      if (!t->empty()) {
        args.push_back({*t, {}, false});
        continue;
      }
      if (*decision == Decision::Skip || !args.empty()) break;
      auto u = ask(in, out, "  no arguments given; record as unjustified? [y/n]: ");
      if (!u || *u == "y") {
        unjustified = true;
        break;
      }
    }
    record_verdict(session, c.id(), *decision, std::move(args), unjustified);
    save_session(session, a.session);
  }
  out << "\nall " << session.candidates.size() << " candidates reviewed; session saved to "
      << a.session << '\n';
  return kOk;
}

inline std::vector<ReviewSession> load_sessions(const std::vector<std::string>& paths) {
  std::vector<ReviewSession> out;
  for (const auto& p : paths) out.push_back(load_session(p));
  return out;
}

struct ReportArgs {
  std::vector<std::string> sessions;
  std::string codebook, format = "text", csv, out;
};

inline int report(const ReportArgs& a, std::ostream& out) {
  auto sessions = load_sessions(a.sessions);
  const SessionStats st = session_stats(sessions);
  std::vector<FrequencyTable> tables;
  if (!a.codebook.empty()) {
    const Codebook cb = codebook_from_json(read_json_file(a.codebook));
    std::set<SmellKind> smells;
    for (const auto& c : cb.codes) smells.insert(c.smell);
    for (auto smell : kAllSmells) {
      if (smells.count(smell)) tables.push_back(frequency_table(cb, sessions, smell));
    }
  }
  if (!a.csv.empty()) {
    std::string csv;
    for (std::size_t i = 0; i < tables.size(); ++i) {
      auto t = frequency_table_csv(tables[i]);
      csv += i == 0 ? t : t.substr(t.find('\n') + 1);
    }
    if (tables.empty()) csv = "smell,stance,code,label,f\n";
    write_file_atomic(a.csv, csv);
  }
  if (a.format == "json") {
    auto ft = nlohmann::json::array();
    for (const auto& t : tables) ft.push_back(frequency_table_to_json(t));
    nlohmann::json j{{"schemaVersion", 1}, {"stats", stats_to_json(st)}, {"frequencyTables", ft}};
    emit(j.dump(2) + "\n", a.out, out);
    return kOk;
  }
  std::ostringstream o;
  o << "validations      " << st.validations << '\n'
    << "arguments        " << st.argumentsTotal << '\n'
    << "discarded        " << st.discarded << " (" << pct(st.discardRatePct) << "% of remaining)\n"
    << "remaining        " << st.remaining << '\n'
    << "accepting share  " << pct(st.acceptSharePct) << "%\n"
    << "rejecting share  " << pct(st.rejectSharePct) << "%\n";
  for (const auto& t : tables) {
    o << '\n' << display_name(t.smell) << '\n';
    const std::size_t rows = std::max(t.accepting.size(), t.rejecting.size());
    o << "  " << pad("Accepting heuristics", 36) << "f    " << pad("Rejecting heuristics", 36)
      << "f\n";
    for (std::size_t i = 0; i < rows; ++i) {
      std::string l = "  ";
      if (i < t.accepting.size()) {
        l += pad(t.accepting[i].label, 36) + pad(std::to_string(t.accepting[i].f), 5);
      } else {
        l += pad("", 41);
      }
      if (i < t.rejecting.size()) {
        l += pad(t.rejecting[i].label, 36) + std::to_string(t.rejecting[i].f);
      }
      while (!l.empty() && l.back() == ' ') l.pop_back();
      o << l << '\n';
    }
    o << "  " << pad("Total", 36) << pad(std::to_string(t.acceptingTotal), 5) << pad("Total", 36)
      << t.rejectingTotal << '\n';
  }
  emit(o.str(), a.out, out);
  return kOk;
}

struct AgreeArgs {
  std::vector<std::string> sessions;
  std::string format = "text", csv, out;
};

inline int agree(const AgreeArgs& a, std::ostream& out) {
  auto sessions = load_sessions(a.sessions);
  const auto reports = agreement_reports(sessions);
  if (!a.csv.empty()) write_file_atomic(a.csv, ratings_csv(build_ratings(sessions)));
  if (a.format == "json") {
    auto arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(agreement_to_json(r));
    nlohmann::json j{{"schemaVersion", 1}, {"reports", arr}};
    emit(j.dump(2) + "\n", a.out, out);
    return kOk;
  }
  std::ostringstream o;
  o << pad("smell", 24) << pad("raters", 8) << pad("subjects", 10) << "kappa\n";
  for (const auto& r : reports) {
    std::string k = "undefined";
    if (r.kappa) {
      std::ostringstream ks;
      ks << std::fixed << std::setprecision(6) << *r.kappa;
      k = ks.str();
    }
    o << pad(r.smell ? std::string(to_string(*r.smell)) : "all", 24)
      << pad(std::to_string(r.raters), 8) << pad(std::to_string(r.subjects), 10) << k << '\n';
  }
  emit(o.str(), a.out, out);
  return kOk;
}

struct ServeArgs {
  std::string candidates, sessions = "sessions", bind = "127.0.0.1", staticDir;
  int port = 8080;
  bool open = false;
};

inline int serve(const ServeArgs& a, std::ostream& out, std::ostream& err) {
  CandidateFile file = load_candidates(a.candidates);
  ProjectModel model = load_project(file.sources);
  ReviewService svc(std::move(file), std::move(model), a.sessions);
  httplib::Server server;
  std::optional<std::filesystem::path> static_dir;
  if (!a.staticDir.empty()) static_dir = a.staticDir;
  mount(server, svc, static_dir);
  const int port = a.port == 0 ? server.bind_to_any_port(a.bind) : a.port;
  if (a.port != 0 && !server.bind_to_port(a.bind, port)) {
    err << "error: cannot bind " << a.bind << ':' << port << '\n';
    return kInput;
  }
  const std::string url = "http://" + a.bind + ":" + std::to_string(port) + "/";
  out << "serving " << svc.candidates().candidates.size() << " candidates on " << url << '\n'
      << std::flush;
  if (a.open) {
    const std::string cmd = "xdg-open '" + url + "' >/dev/null 2>&1 &";
    if (std::system(cmd.c_str()) != 0) err << "warning: could not open a browser\n";
  }
  server.listen_after_bind();
  return kOk;
}

}  // namespace detail

/// Runs one command line (without the program name). Exit codes: 0 ok,
/// 2 bad input, 3 state mismatch, 4 internal failure.
inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"Detects Java code smell candidates and supports their human validation"};
  app.name("smellcheck");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  detail::ScanArgs scan_args;
  auto* scan = app.add_subcommand("scan", "Detect smell candidates in Java sources");
  scan->add_option("paths", scan_args.paths, "Java files or directories")->required();
  scan->add_option("--config", scan_args.config, "Threshold config JSON (default: $SMELLCHECK_CONFIG)");
  scan->add_option("--out", scan_args.out, "Write candidates.json here");
  scan->add_option("--format", scan_args.format)->check(CLI::IsMember({"text", "json"}));
  scan->add_option("--dump-model", scan_args.dumpModel, "Also write the project model JSON");

  detail::ReviewArgs review_args;
  auto* review = app.add_subcommand("review", "Validate candidates interactively");
  review->add_option("--candidates", review_args.candidates)->required();
  review->add_option("--session", review_args.session)->required();
  review->add_option("--reviewer", review_args.reviewer);
  review->add_flag("--resume", review_args.resume, "Require an existing session");

  detail::ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Session statistics and heuristic frequencies");
  report->add_option("sessions", report_args.sessions)->required();
  report->add_option("--codebook", report_args.codebook);
  report->add_option("--format", report_args.format)->check(CLI::IsMember({"text", "json"}));
  report->add_option("--csv", report_args.csv, "Write frequency tables as CSV");
  report->add_option("--out", report_args.out);

  detail::AgreeArgs agree_args;
  auto* agree = app.add_subcommand("agree", "Fleiss kappa across reviewers");
  agree->add_option("sessions", agree_args.sessions)->required();
  agree->add_option("--format", agree_args.format)->check(CLI::IsMember({"text", "json"}));
  agree->add_option("--csv", agree_args.csv, "Write the rating matrix as CSV");
  agree->add_option("--out", agree_args.out);

  std::string catalog_out;
  auto* catalog = app.add_subcommand("export-catalog", "Write the validation items as JSON");
  catalog->add_option("--out", catalog_out);

  detail::ServeArgs serve_args;
  auto* serve = app.add_subcommand("serve", "Run the local review API");
  serve->add_option("--candidates", serve_args.candidates)->required();
  serve->add_option("--sessions", serve_args.sessions, "Session directory");
  serve->add_option("--bind", serve_args.bind);
  serve->add_option("--port", serve_args.port, "0 picks a free port");
  serve->add_option("--static", serve_args.staticDir, "Built UI bundle to serve");
  serve->add_flag("--open", serve_args.open);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*scan) return detail::scan(scan_args, out, err);
    if (*review) return detail::review(review_args, in, out, err);
    if (*report) return detail::report(report_args, out);
    if (*agree) {
      if (agree_args.sessions.size() < 2) {
        err << "error: agreement needs at least two sessions\n";
        return kInput;
      }
      return detail::agree(agree_args, out);
    }
    if (*catalog) {
      detail::emit(catalog_to_json().dump(2) + "\n", catalog_out, out);
      return kOk;
    }
    if (*serve) return detail::serve(serve_args, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << " [" << to_string(e.code()) << "]\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}

}  // namespace smellcheck::cli
