#include <gtest/gtest.h>

#include <set>

#include "../support.hpp"

using namespace smellcheck;
using fixtures::error_of;
using fixtures::model_of;

namespace {

std::vector<SmellCandidate> of_smell(const std::vector<SmellCandidate>& all, SmellKind k) {
  std::vector<SmellCandidate> out;
  for (const auto& c : all) {
    if (c.smell() == k) out.push_back(c);
  }
  return out;
}

}  // namespace

TEST(Detect, SixParametersGiveOneLongParameterList) {
  auto m = model_of({"class A { void f(int a, int b, int c, int d, int e, Object g) { } }"});
  auto lpl = of_smell(detect(m), SmellKind::LongParameterList);
  ASSERT_EQ(lpl.size(), 1u);
  ASSERT_EQ(lpl[0].triggeredBy().size(), 1u);
  const auto& t = lpl[0].triggeredBy()[0];
  EXPECT_EQ(t.metric, "paramCount");
  EXPECT_EQ(t.value, 6);
  EXPECT_EQ(t.threshold, 5);
  EXPECT_NE(explain(lpl[0]).find("paramCount 6 ≥ 5"), std::string::npos) << explain(lpl[0]);
}

TEST(Detect, SmallGetterSetterClassIsDataClass) {
  auto m = model_of({R"(class Point {
  private int x;
  private int y;
  public int getX() { return x; }
  public int getY() { return y; }
  public void setX(int v) { x = v; }
}
)"});
  auto dc = of_smell(detect(m), SmellKind::DataClass);
  ASSERT_EQ(dc.size(), 1u);
  EXPECT_EQ(dc[0].entity().id, "Point");
  EXPECT_EQ(dc[0].entity().kind, EntityKind::Type);
}

TEST(Detect, EmptyProject) {
  EXPECT_TRUE(detect(resolve_project({})).empty());
}

TEST(Detect, GodClassExplainsBothTriggersInMetricOrder) {
  std::string src = "class Big {\n";
  for (int i = 0; i < 20; ++i) {
    src += "  int m" + std::to_string(i) + "(int a) {\n";
    for (int k = 0; k < 9; ++k) src += "    a = a + " + std::to_string(k) + ";\n";
    src += "    return a;\n  }\n";
  }
  src += "}\n";
  auto god = of_smell(detect(model_of({src})), SmellKind::GodClass);
  ASSERT_EQ(god.size(), 1u);
  auto text = explain(god[0]);
  auto loc = text.find("loc ");
  auto nom = text.find("nom 20 ≥ 15");
  ASSERT_NE(loc, std::string::npos) << text;
  ASSERT_NE(nom, std::string::npos) << text;
  EXPECT_LT(loc, nom);
}

TEST(Detect, OneCandidatePerEntityAndSmell) {
  auto all = detect(fixtures::corpus_model());
  std::set<std::pair<SmellKind, std::string>> seen;
  for (const auto& c : all) {
    EXPECT_TRUE(seen.insert({c.smell(), c.entity().id}).second) << c.entity().id;
    EXPECT_FALSE(c.triggeredBy().empty());
    EXPECT_TRUE(smell_targets(c.smell(), c.entity().kind));
  }
}

TEST(Detect, OrderIsFileThenLineThenSmell) {
  auto all = detect(fixtures::corpus_model());
  for (std::size_t i = 1; i < all.size(); ++i) {
    const auto& a = all[i - 1];
    const auto& b = all[i];
    EXPECT_LE(std::tie(a.file(), a.sourceSpan().first), std::tie(b.file(), b.sourceSpan().first));
  }
}

TEST(Detect, CorpusTwins) {
  auto all = detect(fixtures::corpus_model());
  std::map<std::string, std::set<SmellKind>> by_dir;
  for (const auto& c : all) {
    auto rel = std::filesystem::path(c.file()).lexically_relative(fixtures::corpus());
    by_dir[rel.begin()->string() + "/" + std::next(rel.begin())->string()].insert(c.smell());
  }
  for (auto smell : kAllSmells) {
    std::string dir = std::string(to_string(smell));
    std::transform(dir.begin(), dir.end(), dir.begin(), ::tolower);
    EXPECT_TRUE(by_dir[dir + "/smelly"].count(smell)) << dir;
    EXPECT_TRUE(by_dir[dir + "/clean"].empty()) << dir;
  }
}

TEST(Detect, Deterministic) {
  auto m = fixtures::corpus_model();
  EXPECT_EQ(detect(m), detect(m));
  EXPECT_EQ(detect(m), detect(fixtures::corpus_model()));
}

TEST(DetectionConfig, ValidationRejectsBadThresholds) {
  DetectionConfig cfg;
  cfg.lplMinParams = 0;
  EXPECT_EQ(error_of([&] { cfg.validate(); }), ErrorCode::InvalidConfig);
  cfg = {};
  cfg.envyMaxOwnRatio = 1.5;
  EXPECT_EQ(error_of([&] { detect(resolve_project({}), cfg); }), ErrorCode::InvalidConfig);
  cfg = {};
  cfg.dataMaxNonAccessor = -1;
  EXPECT_EQ(error_of([&] { cfg.validate(); }), ErrorCode::InvalidConfig);
}

TEST(DetectionConfig, JsonOverridesAndRejectsUnknownKeys) {
  auto cfg = config_from_json(nlohmann::json{{"lplMinParams", 3}});
  EXPECT_EQ(cfg.lplMinParams, 3);
  EXPECT_EQ(cfg.godMinLoc, 200);
  EXPECT_EQ(error_of([] { config_from_json(nlohmann::json{{"lplMinParam", 3}}); }),
            ErrorCode::InvalidConfig);
  EXPECT_EQ(error_of([] { config_from_json(nlohmann::json{{"godMinNom", -2}}); }),
            ErrorCode::InvalidConfig);
}

TEST(SmellCandidate, EmptyTriggersRejectedAtConstruction) {
  auto code = error_of([] {
    SmellCandidate::create(SmellKind::LongParameterList, {EntityKind::Method, "A#f()"}, "A.java",
                           {1, 2}, {});
  });
  EXPECT_EQ(code, ErrorCode::InvalidCandidate);
}

TEST(SmellCandidate, EntityKindMustMatchSmell) {
  auto code = error_of([] {
    SmellCandidate::create(SmellKind::LongParameterList, {EntityKind::Type, "A"}, "A.java", {1, 2},
                           {{"paramCount", 6, 5, Comparison::AtLeast}});
  });
  EXPECT_EQ(code, ErrorCode::InvalidCandidate);
}

TEST(SmellCandidate, IdIsStableHashOfSmellEntityFile) {
  auto make = [](std::string file) {
    return SmellCandidate::create(SmellKind::DataClass, {EntityKind::Type, "p.A"}, file, {1, 9},
                                  {{"nom", 2, 0, Comparison::Above}});
  };
  EXPECT_EQ(make("A.java").id(), make("A.java").id());
  EXPECT_NE(make("A.java").id(), make("B.java").id());
  EXPECT_EQ(make("A.java").id().size(), 16u);
}

TEST(CandidatesJson, RoundTrip) {
  CandidateFile f;
  f.sources = {fixtures::corpus().string()};
  f.candidates = detect(fixtures::corpus_model());
  auto j = candidates_to_json(f);
  auto back = candidates_from_json(j);
  EXPECT_EQ(back.candidates, f.candidates);
  EXPECT_EQ(candidates_to_json(back).dump(), j.dump());
}

TEST(CandidatesJson, TamperedIdIsRejected) {
  auto all = detect(fixtures::corpus_model());
  auto j = candidate_to_json(all.at(0));
  j["entity"]["id"] = "somewhere.Else";
  EXPECT_EQ(error_of([&] { candidate_from_json(j); }), ErrorCode::InvalidCandidate);
  auto k = candidate_to_json(all.at(0));
  k["triggeredBy"] = nlohmann::json::array();
  EXPECT_EQ(error_of([&] { candidate_from_json(k); }), ErrorCode::InvalidCandidate);
  EXPECT_EQ(error_of([] { candidate_from_json(nlohmann::json{{"id", 1}}); }),
            ErrorCode::SchemaViolation);
}

TEST(Explain, FormatsRatiosCompactly) {
  EXPECT_EQ(format_metric_value(6), "6");
  EXPECT_EQ(format_metric_value(0.75), "0.75");
  EXPECT_EQ(format_metric_value(1.0 / 3.0), "0.3333");
}
