#include <gtest/gtest.h>

#include "../replay.hpp"
#include "../support.hpp"

using namespace smellcheck;
using fixtures::error_of;

namespace {

struct Setup {
  Codebook cb;
  std::vector<ReviewSession> sessions;
};

// One session, LPL candidates p1..p4 accepted and r1 rejected, one argument each.
Setup lpl_setup() {
  Setup s;
  std::vector<CandidateEntry> entries;
  for (auto id : {"p1", "p2", "p3", "p4", "r1"}) entries.push_back({id, SmellKind::LongParameterList});
  entries.push_back({"d1", SmellKind::DataClass});
  auto session = create_session(entries, "dev", nullptr, replay::fixed_clock, "s-1");
  for (auto id : {"p1", "p2", "p3", "p4"}) {
    record_verdict(session, id, Decision::Accept, {{std::string("arg ") + id, {}, false}});
  }
  record_verdict(session, "r1", Decision::Reject, {{"needed", {}, false}, {"noise", {}, true}});
  record_verdict(session, "d1", Decision::Accept, {{"getters only", {}, false}});
  s.sessions.push_back(std::move(session));
  return s;
}

std::size_t f_of(const Codebook& cb, std::span<const ReviewSession> ss, const std::string& id) {
  auto f = code_frequencies(cb, ss, cb.require(id).smell);
  return f.count(id) ? f.at(id) : 0;
}

}  // namespace

TEST(Codebook, MergeAddsFrequencies) {
  auto s = lpl_setup();
  auto tmp = add_code(s.cb, "Too many parameters", SmellKind::LongParameterList, Stance::Accepting);
  auto cpx = add_code(s.cb, "Too many complex parameters", SmellKind::LongParameterList,
                      Stance::Accepting);
  code_argument(s.cb, s.sessions[0], {"s-1", "p1", 0}, tmp);
  code_argument(s.cb, s.sessions[0], {"s-1", "p2", 0}, cpx);
  code_argument(s.cb, s.sessions[0], {"s-1", "p3", 0}, cpx);
  auto merged = merge_codes(s.cb, s.sessions, {tmp, cpx}, "Parameter load");
  EXPECT_EQ(f_of(s.cb, s.sessions, merged), 3u);
  EXPECT_TRUE(s.cb.require(tmp).retired);
  EXPECT_EQ(s.cb.require(merged).mergedFrom, (std::vector<std::string>{tmp, cpx}));
  EXPECT_EQ(s.cb.require(cpx).replacedBy, std::vector<std::string>{merged});
}

TEST(Codebook, SplitThreeOne) {
  auto s = lpl_setup();
  auto misuse = add_code(s.cb, "Misuse", SmellKind::LongParameterList, Stance::Accepting);
  for (auto id : {"p1", "p2", "p3", "p4"}) code_argument(s.cb, s.sessions[0], {"s-1", id, 0}, misuse);
  auto parts = split_code(s.cb, s.sessions, misuse, {"Unnecessary", "Builder misuse"},
                          {{{"s-1", "p4", 0}, 1}});
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_EQ(f_of(s.cb, s.sessions, parts[0]), 3u);
  EXPECT_EQ(f_of(s.cb, s.sessions, parts[1]), 1u);
  EXPECT_EQ(s.cb.require(parts[1]).splitFrom.value_or(""), misuse);
  EXPECT_EQ(f_of(s.cb, s.sessions, misuse), 0u);
}

TEST(Codebook, MixedStanceMergeRejected) {
  auto s = lpl_setup();
  auto a = add_code(s.cb, "Too many", SmellKind::LongParameterList, Stance::Accepting);
  auto r = add_code(s.cb, "Needed", SmellKind::LongParameterList, Stance::Rejecting);
  EXPECT_EQ(error_of([&] { merge_codes(s.cb, s.sessions, {a, r}, "x"); }),
            ErrorCode::MixedStanceMerge);
  auto d = add_code(s.cb, "Getters", SmellKind::DataClass, Stance::Accepting);
  EXPECT_EQ(error_of([&] { merge_codes(s.cb, s.sessions, {a, d}, "x"); }),
            ErrorCode::MixedSmellMerge);
  EXPECT_EQ(error_of([&] { merge_codes(s.cb, s.sessions, {a, a}, "x"); }), ErrorCode::UnknownCode);
}

TEST(Codebook, CodingErrors) {
  auto s = lpl_setup();
  auto a = add_code(s.cb, "Too many", SmellKind::LongParameterList, Stance::Accepting);
  auto d = add_code(s.cb, "Getters", SmellKind::DataClass, Stance::Accepting);
  auto& sess = s.sessions[0];
  EXPECT_EQ(error_of([&] { code_argument(s.cb, sess, {"s-1", "r1", 0}, a); }),
            ErrorCode::StanceMismatch);
  EXPECT_EQ(error_of([&] { code_argument(s.cb, sess, {"s-1", "p1", 0}, d); }),
            ErrorCode::SmellMismatch);
  EXPECT_EQ(error_of([&] { code_argument(s.cb, sess, {"s-1", "p1", 5}, a); }),
            ErrorCode::UnknownArgument);
  EXPECT_EQ(error_of([&] { code_argument(s.cb, sess, {"s-9", "p1", 0}, a); }),
            ErrorCode::UnknownSession);
  EXPECT_EQ(error_of([&] { code_argument(s.cb, sess, {"s-1", "p1", 0}, "H99"); }),
            ErrorCode::UnknownCode);
  auto r = add_code(s.cb, "Needed", SmellKind::LongParameterList, Stance::Rejecting);
  EXPECT_EQ(error_of([&] { code_argument(s.cb, sess, {"s-1", "r1", 1}, r); }),
            ErrorCode::DiscardedArgument);
  // coding twice with the same code tags once
  code_argument(s.cb, sess, {"s-1", "p1", 0}, a);
  code_argument(s.cb, sess, {"s-1", "p1", 0}, a);
  EXPECT_EQ(f_of(s.cb, s.sessions, a), 1u);
  // retired codes take no new tags
  auto b = add_code(s.cb, "Long", SmellKind::LongParameterList, Stance::Accepting);
  merge_codes(s.cb, s.sessions, {a, b}, "Merged");
  EXPECT_EQ(error_of([&] { code_argument(s.cb, sess, {"s-1", "p2", 0}, a); }),
            ErrorCode::UnknownCode);
}

TEST(FrequencyTable, EmptyCodebook) {
  Codebook cb;
  std::vector<ReviewSession> none;
  auto t = frequency_table(cb, none, SmellKind::LongParameterList);
  EXPECT_TRUE(t.accepting.empty());
  EXPECT_TRUE(t.rejecting.empty());
  EXPECT_EQ(t.acceptingTotal, 0u);
  EXPECT_EQ(t.rejectingTotal, 0u);
}

TEST(FrequencyTable, FirstTaskReplay) {
  auto doc = replay::load(fixtures::dir() / "coding" / "lpl_transcript.json");
  auto coding = replay::transcript(doc, 1);
  auto t = frequency_table(coding.codebook, coding.sessions, SmellKind::LongParameterList);
  const auto& want = doc["expected"]["firstTask"];
  EXPECT_EQ(t.acceptingTotal, 5u);
  EXPECT_EQ(t.rejectingTotal, 7u);
  EXPECT_EQ(replay::rows(t.accepting), replay::rows(want["accepting"]));
  EXPECT_EQ(replay::rows(t.rejecting), replay::rows(want["rejecting"]));
}

TEST(FrequencyTable, RefinedReplay) {
  auto doc = replay::load(fixtures::dir() / "coding" / "lpl_transcript.json");
  auto coding = replay::transcript(doc);
  const auto before = frequency_table(coding.codebook, coding.sessions, SmellKind::LongParameterList);
  replay::refine(coding, doc);
  auto t = frequency_table(coding.codebook, coding.sessions, SmellKind::LongParameterList);
  const auto& want = doc["expected"]["refined"];
  EXPECT_EQ(t.acceptingTotal, 20u);
  EXPECT_EQ(t.rejectingTotal, 18u);
  ASSERT_FALSE(t.accepting.empty());
  EXPECT_EQ(t.accepting[0].label, "Too many parameters");
  EXPECT_EQ(t.accepting[0].f, 6u);
  EXPECT_EQ(replay::rows(t.accepting), replay::rows(want["accepting"]));
  EXPECT_EQ(replay::rows(t.rejecting), replay::rows(want["rejecting"]));
  EXPECT_EQ(before.acceptingTotal, t.acceptingTotal);
  EXPECT_EQ(before.rejectingTotal, t.rejectingTotal);
}

TEST(FrequencyTable, CsvAndJson) {
  auto doc = replay::load(fixtures::dir() / "coding" / "lpl_transcript.json");
  auto coding = replay::transcript(doc, 1);
  auto t = frequency_table(coding.codebook, coding.sessions, SmellKind::LongParameterList);
  auto csv = frequency_table_csv(t);
  EXPECT_EQ(csv.rfind("smell,stance,code,label,f\n", 0), 0u);
  EXPECT_NE(csv.find("LongParameterList,accepting,,Total,5"), std::string::npos) << csv;
  EXPECT_NE(csv.find("LongParameterList,rejecting,,Total,7"), std::string::npos) << csv;
  auto j = frequency_table_to_json(t);
  EXPECT_EQ(j["acceptingTotal"], 5);
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(Codebook, JsonRoundTrip) {
  auto doc = replay::load(fixtures::dir() / "coding" / "lpl_transcript.json");
  auto coding = replay::transcript(doc);
  replay::refine(coding, doc);
  auto j = codebook_to_json(coding.codebook);
  auto back = codebook_from_json(j);
  EXPECT_EQ(codebook_to_json(back).dump(), j.dump());
  auto bad = j;
  bad["codes"][0]["stance"] = "neutral";
  EXPECT_EQ(error_of([&] { codebook_from_json(bad); }), ErrorCode::SchemaViolation);
}
