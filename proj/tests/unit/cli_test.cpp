#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "../replay.hpp"
#include "../support.hpp"
#include "smellcheck/cli.hpp"

using namespace smellcheck;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("smellcheck-cli-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(const std::vector<std::string>& args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = smellcheck::cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string scan_corpus(const TempDir& t, const std::string& root = fixtures::corpus().string()) {
  const std::string path = t / "candidates.json";
  const Outcome r = invoke({"scan", root, "--format", "json", "--out", path});
  EXPECT_EQ(r.code, 0) << r.err;
  return path;
}

// One candidate: skip its items, accept with one argument.
std::string accept_one(SmellKind smell) {
  std::string s;
  for (std::size_t i = 0; i < items_for(smell).size(); ++i) s += "\n";
  return s + "a\nit is too big\n\n";
}

}  // namespace

TEST(CliScan, CorpusYieldsACandidatePerSmellyTwin) {
  TempDir t;
  const auto path = scan_corpus(t);
  const auto file = candidates_from_json(read_json_file(path));
  EXPECT_GE(file.candidates.size(), 8u);
  EXPECT_EQ(file.sources.size(), 16u);
  for (const auto& c : file.candidates) {
    EXPECT_NE(c.file().find("/smelly/"), std::string::npos) << c.file();
  }
}

TEST(CliScan, TextFormatListsCandidatesAndSummary) {
  const Outcome r = invoke({"scan", fixtures::corpus().string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("candidate(s) in 16 file(s)"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("LongParameterList"), std::string::npos);
}

TEST(CliScan, EmptyDirectoryIsNotAnError) {
  TempDir t;
  fs::create_directories(t.path / "empty");
  const Outcome r = invoke({"scan", t / "empty", "--format", "json"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(nlohmann::json::parse(r.out)["candidates"].empty());
}

TEST(CliScan, MissingPathExitsWithInputError) {
  const Outcome r = invoke({"scan", "/no/such/place"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("no such path"), std::string::npos) << r.err;
}

TEST(CliScan, BadConfigExitsWithInputError) {
  TempDir t;
  write_file_atomic(t / "cfg.json", R"({"lplMinParams": 5, "noSuchKnob": 1})");
  EXPECT_EQ(invoke({"scan", fixtures::corpus().string(), "--config", t / "cfg.json"}).code, 2);
  write_file_atomic(t / "cfg.json", "{ not json");
  EXPECT_EQ(invoke({"scan", fixtures::corpus().string(), "--config", t / "cfg.json"}).code, 2);
}

TEST(CliScan, ConfigRaisesThresholds) {
  TempDir t;
  write_file_atomic(t / "cfg.json", R"({"lplMinParams": 50})");
  const Outcome r = invoke({"scan", fixtures::corpus().string(), "--config", t / "cfg.json", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& c : nlohmann::json::parse(r.out)["candidates"]) {
    EXPECT_NE(c["smell"], "LongParameterList");
  }
}

TEST(CliScan, DumpModelWritesTheProjectModel) {
  TempDir t;
  const Outcome r = invoke({"scan", fixtures::corpus().string(), "--dump-model", t / "model.json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto model = read_json_file(t / "model.json");
  EXPECT_TRUE(model.is_object());
}

TEST(CliScan, UsageErrorsExitWithTwo) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"scan"}).code, 2);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST(CliReview, QuitSavesAndResumeContinues) {
  TempDir t;
  const auto cands = scan_corpus(t);
  const auto file = candidates_from_json(read_json_file(cands));
  ASSERT_GE(file.candidates.size(), 2u);
  const std::string session = t / "s.json";

  Outcome r = invoke({"review", "--candidates", cands, "--session", session, "--reviewer", "R01"},
              accept_one(file.candidates[0].smell()) + "q\n");
  ASSERT_EQ(r.code, 0) << r.err;
  auto s = load_session(session);
  EXPECT_EQ(s.reviewerId, "R01");
  ASSERT_EQ(s.verdicts.size(), 1u);
  const auto& v = s.verdicts.at(file.candidates[0].id());
  EXPECT_EQ(v.decision, Decision::Accept);
  ASSERT_EQ(v.arguments.size(), 1u);
  EXPECT_EQ(v.arguments[0].text, "it is too big");

  // end of input also saves
  r = invoke({"review", "--candidates", cands, "--session", session, "--resume"},
          accept_one(file.candidates[1].smell()));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("resuming session"), std::string::npos);
  EXPECT_EQ(load_session(session).verdicts.size(), 2u);
}

TEST(CliReview, ItemAnswersAreRecorded) {
  TempDir t;
  const auto cands = scan_corpus(t);
  const auto file = candidates_from_json(read_json_file(cands));
  const auto& first = file.candidates[0];
  const auto items = items_for(first.smell());
  std::string script = "maybe\ny\n";  // an unrecognized answer is asked again
  for (std::size_t i = 1; i < items.size(); ++i) script += "n\n";
  script += "r\nnot really\n\nq\n";
  const Outcome r = invoke({"review", "--candidates", cands, "--session", t / "s.json"}, script);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = load_session(t / "s.json");
  EXPECT_EQ(s.verdicts.at(first.id()).decision, Decision::Reject);
  ASSERT_EQ(s.answers.size(), items.size());
  EXPECT_EQ(s.answers.at({first.id(), std::string(items[0].id)}), ItemResponse::Yes);
  EXPECT_EQ(s.answers.at({first.id(), std::string(items[1].id)}), ItemResponse::No);
}

TEST(CliReview, VerdictWithoutArgumentsCanBeUnjustified) {
  TempDir t;
  const auto cands = scan_corpus(t);
  const auto file = candidates_from_json(read_json_file(cands));
  std::string script(items_for(file.candidates[0].smell()).size(), '\n');
  script += "a\n\ny\nq\n";
  ASSERT_EQ(invoke({"review", "--candidates", cands, "--session", t / "s.json"}, script).code, 0);
  const auto& v = load_session(t / "s.json").verdicts.at(file.candidates[0].id());
  EXPECT_TRUE(v.unjustified);
  EXPECT_TRUE(v.arguments.empty());
}

TEST(CliReview, WholeSetCanBeReviewed) {
  TempDir t;
  const auto cands = scan_corpus(t);
  const auto file = candidates_from_json(read_json_file(cands));
  std::string script;
  for (const auto& c : file.candidates) script += accept_one(c.smell());
  const Outcome r = invoke({"review", "--candidates", cands, "--session", t / "s.json"}, script);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("candidates reviewed"), std::string::npos);
  const auto s = load_session(t / "s.json");
  EXPECT_EQ(s.verdicts.size(), file.candidates.size());
  EXPECT_FALSE(next_pending(s).has_value());
}

TEST(CliReview, ResumeWithoutSessionIsAnInputError) {
  TempDir t;
  const auto cands = scan_corpus(t);
  EXPECT_EQ(invoke({"review", "--candidates", cands, "--session", t / "none.json", "--resume"}).code, 2);
}

TEST(CliReview, SessionFromOtherCandidatesIsAStateMismatch) {
  TempDir t;
  const auto all = scan_corpus(t);
  const std::string some = t / "some.json";
  ASSERT_EQ(invoke({"scan", (fixtures::corpus() / "godclass").string(), "--format", "json", "--out", some}).code, 0);
  ASSERT_EQ(invoke({"review", "--candidates", all, "--session", t / "s.json"}, "q\n").code, 0);
  const Outcome r = invoke({"review", "--candidates", some, "--session", t / "s.json"}, "q\n");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("different candidate set"), std::string::npos);
}

TEST(CliReview, CorruptSessionIsAnInputError) {
  TempDir t;
  const auto cands = scan_corpus(t);
  write_file_atomic(t / "s.json", R"({"schemaVersion": 1})");
  EXPECT_EQ(invoke({"review", "--candidates", cands, "--session", t / "s.json"}, "q\n").code, 2);
}

TEST(CliReport, ArgumentFixtureStatistics) {
  TempDir t;
  const auto sessions = replay::argument_sessions(replay::load(fixtures::dir() / "stats/arguments_303.json"));
  std::vector<std::string> args{"report"};
  for (const auto& s : sessions) {
    save_session(s, t / (s.sessionId + ".json"));
    args.push_back(t / (s.sessionId + ".json"));
  }
  args.insert(args.end(), {"--format", "json"});
  const Outcome r = invoke(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto st = nlohmann::json::parse(r.out)["stats"];
  EXPECT_EQ(st["validations"], 288);
  EXPECT_EQ(st["argumentsTotal"], 303);
  EXPECT_EQ(st["discarded"], 32);
  EXPECT_EQ(st["remaining"], 271);
  EXPECT_NEAR(st["acceptSharePct"].get<double>(), 57.93, 0.01);

  args.resize(args.size() - 2);
  const Outcome text = invoke(args);
  EXPECT_NE(text.out.find("remaining        271"), std::string::npos) << text.out;
  EXPECT_NE(text.out.find("accepting share  57.93%"), std::string::npos) << text.out;
}

TEST(CliReport, RefinedCodebookReproducesTheTables) {
  TempDir t;
  const auto doc = replay::load(fixtures::dir() / "coding/lpl_transcript.json");
  auto coding = replay::transcript(doc);
  replay::refine(coding, doc);
  std::vector<std::string> args{"report"};
  for (const auto& s : coding.sessions) {
    save_session(s, t / (s.sessionId + ".json"));
    args.push_back(t / (s.sessionId + ".json"));
  }
  write_file_atomic(t / "codebook.json", codebook_to_json(coding.codebook).dump(2));
  args.insert(args.end(), {"--codebook", t / "codebook.json", "--csv", t / "f.csv", "--format", "json"});
  const Outcome r = invoke(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto tables = nlohmann::json::parse(r.out)["frequencyTables"];
  ASSERT_EQ(tables.size(), 1u);
  auto pairs = [](const nlohmann::json& rows) {
    std::vector<std::pair<std::string, std::size_t>> out;
    for (const auto& r : rows) out.emplace_back(r["label"], r["f"]);
    return out;
  };
  EXPECT_EQ(pairs(tables[0]["accepting"]), replay::rows(doc["expected"]["refined"]["accepting"]));
  EXPECT_EQ(pairs(tables[0]["rejecting"]), replay::rows(doc["expected"]["refined"]["rejecting"]));
  EXPECT_EQ(tables[0]["acceptingTotal"], 20);
  EXPECT_EQ(tables[0]["rejectingTotal"], 18);

  const std::string csv = read_file(t / "f.csv");
  EXPECT_EQ(csv.rfind("smell,stance,code,label,f\n", 0), 0u) << csv;
  EXPECT_NE(csv.find("LongParameterList,accepting,,Total,20"), std::string::npos) << csv;
  EXPECT_NE(csv.find("LongParameterList,rejecting,,Total,18"), std::string::npos) << csv;
}

TEST(CliReport, MissingSessionIsAnInputError) {
  EXPECT_EQ(invoke({"report", "/no/such/session.json"}).code, 2);
}

TEST(CliAgree, KappaFixtureThroughSessionFiles) {
  TempDir t;
  const auto doc = replay::load(fixtures::dir() / "agreement/kappa_12x24.json");
  const auto sessions =
      replay::sessions_from_counts(doc["acceptCounts"].get<std::vector<int>>(), doc["raters"].get<int>());
  std::vector<std::string> args{"agree"};
  for (const auto& s : sessions) {
    save_session(s, t / (s.sessionId + ".json"));
    args.push_back(t / (s.sessionId + ".json"));
  }
  args.insert(args.end(), {"--format", "json", "--csv", t / "ratings.csv"});
  const Outcome r = invoke(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto overall = nlohmann::json::parse(r.out)["reports"][0];
  EXPECT_EQ(overall["smell"], "all");
  EXPECT_EQ(overall["raters"], 12);
  EXPECT_EQ(overall["subjects"], 24);
  EXPECT_NEAR(overall["kappa"].get<double>(), 7.0 / 25.0, 1e-6);
  const std::string csv = read_file(t / "ratings.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 25);
}

TEST(CliAgree, IdenticalSessionsAgreePerfectly) {
  TempDir t;
  const auto doc = replay::load(fixtures::dir() / "agreement/kappa_12x24.json");
  auto sessions = replay::sessions_from_counts(doc["acceptCounts"].get<std::vector<int>>(), 12);
  auto twin = sessions[0];
  twin.sessionId = "s-twin";
  save_session(sessions[0], t / "a.json");
  save_session(twin, t / "b.json");
  const Outcome r = invoke({"agree", t / "a.json", t / "b.json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("1.000000"), std::string::npos) << r.out;
}

TEST(CliAgree, NeedsTwoSessions) {
  TempDir t;
  const auto doc = replay::load(fixtures::dir() / "agreement/kappa_12x24.json");
  save_session(replay::sessions_from_counts(doc["acceptCounts"].get<std::vector<int>>(), 12)[0],
               t / "a.json");
  const Outcome r = invoke({"agree", t / "a.json"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("at least two"), std::string::npos);
}

TEST(CliAgree, DifferentCandidateSetsAreAStateMismatch) {
  TempDir t;
  auto a = create_session(replay::numbered_candidates(3, SmellKind::GodClass), "a", nullptr,
                          replay::fixed_clock, "s-a");
  auto b = create_session(replay::numbered_candidates(4, SmellKind::GodClass), "b", nullptr,
                          replay::fixed_clock, "s-b");
  save_session(a, t / "a.json");
  save_session(b, t / "b.json");
  EXPECT_EQ(invoke({"agree", t / "a.json", t / "b.json"}).code, 3);
}

TEST(CliCatalog, ExportsAllItems) {
  TempDir t;
  const Outcome r = invoke({"export-catalog", "--out", t / "catalog.json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = read_json_file(t / "catalog.json");
  std::size_t derived = 0, listed = 0;
  for (const auto& item : j["items"]) (item["derived"].get<bool>() ? derived : listed)++;
  EXPECT_EQ(listed, 22u);
  EXPECT_EQ(derived, 4u);
  EXPECT_EQ(invoke({"export-catalog"}).out, read_file(t / "catalog.json"));
}

TEST(CliReport, SingleEmptySessionGivesZeros) {
  TempDir t;
  save_session(create_session(replay::numbered_candidates(3, SmellKind::DataClass), "R01", nullptr,
                              replay::fixed_clock, "s-empty"),
               t / "s.json");
  const Outcome r = invoke({"report", t / "s.json", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto st = nlohmann::json::parse(r.out)["stats"];
  for (const auto& key : {"validations", "argumentsTotal", "discarded", "remaining"}) EXPECT_EQ(st[key], 0) << key;
  EXPECT_EQ(st["acceptSharePct"], 0.0);
}

TEST(CliReport, MergedSessionsAreAdditive) {
  TempDir t;
  const auto sessions = replay::argument_sessions(replay::load(fixtures::dir() / "stats/arguments_303.json"));
  std::vector<std::string> all;
  std::size_t validations = 0, total = 0, discarded = 0;
  for (const auto& s : sessions) {
    save_session(s, t / (s.sessionId + ".json"));
    all.push_back(t / (s.sessionId + ".json"));
    const auto one = nlohmann::json::parse(invoke({"report", all.back(), "--format", "json"}).out)["stats"];
    validations += one["validations"].get<std::size_t>();
    total += one["argumentsTotal"].get<std::size_t>();
    discarded += one["discarded"].get<std::size_t>();
  }
  all.insert(all.begin(), "report");
  all.insert(all.end(), {"--format", "json"});
  const auto merged = nlohmann::json::parse(invoke(all).out)["stats"];
  EXPECT_EQ(merged["validations"], validations);
  EXPECT_EQ(merged["argumentsTotal"], total);
  EXPECT_EQ(merged["discarded"], discarded);
}
