#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "smellcheck/hash.hpp"
#include "smellcheck/metrics.hpp"
#include "smellcheck/smell_kind.hpp"
#include "smellcheck/source_model.hpp"

namespace smellcheck {

inline constexpr int kCandidatesSchemaVersion = 1;

/// Rule thresholds. The defaults are engineering starting points; any of them
/// can be overridden from a JSON config file.
struct DetectionConfig {
  int lplMinParams = 5;
  int godMinLoc = 200;
  int godMinNom = 15;
  int dataMaxNonAccessor = 0;
  double middleMinDelegationRatio = 0.5;
  int middleMinNom = 3;
  int envyMinForeignCalls = 5;
  double envyMaxOwnRatio = 0.33;
  int bequestMinUnusedInherited = 2;
  double bequestMinOverrideRatio = 0.5;
  int primObsMinPrimitiveFields = 6;
  int primObsMinPrimitiveParams = 4;
  bool specGenEmptyType = true;
  bool specGenAbstractType = true;
  bool specGenUnusedMethod = true;

  void validate() const {
    auto positive = [](int v, const char* name) {
      if (v < 1) {
        throw Error(ErrorCode::InvalidConfig,
                    std::string(name) + " must be a positive count");
      }
    };
    auto unit = [](double v, const char* name) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorCode::InvalidConfig,
                    std::string(name) + " must lie in [0,1]");
      }
    };
    positive(lplMinParams, "lplMinParams");
    positive(godMinLoc, "godMinLoc");
    positive(godMinNom, "godMinNom");
    if (dataMaxNonAccessor < 0) {
      throw Error(ErrorCode::InvalidConfig, "dataMaxNonAccessor must be >= 0");
    }
    positive(middleMinNom, "middleMinNom");
    positive(envyMinForeignCalls, "envyMinForeignCalls");
    positive(bequestMinUnusedInherited, "bequestMinUnusedInherited");
    positive(primObsMinPrimitiveFields, "primObsMinPrimitiveFields");
    positive(primObsMinPrimitiveParams, "primObsMinPrimitiveParams");
    unit(middleMinDelegationRatio, "middleMinDelegationRatio");
    unit(envyMaxOwnRatio, "envyMaxOwnRatio");
    unit(bequestMinOverrideRatio, "bequestMinOverrideRatio");
  }
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    DetectionConfig, lplMinParams, godMinLoc, godMinNom, dataMaxNonAccessor,
    middleMinDelegationRatio, middleMinNom, envyMinForeignCalls,
    envyMaxOwnRatio, bequestMinUnusedInherited, bequestMinOverrideRatio,
    primObsMinPrimitiveFields, primObsMinPrimitiveParams, specGenEmptyType,
    specGenAbstractType, specGenUnusedMethod)

/// Parses a config document; unknown keys are rejected so typos surface.
inline DetectionConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  }
  const nlohmann::json known = DetectionConfig{};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) {
      throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
    }
  }
  DetectionConfig cfg;
  try {
    cfg = j.get<DetectionConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  cfg.validate();
  return cfg;
}

enum class EntityKind { Type, Method };

struct EntityRef {
  EntityKind kind = EntityKind::Type;
  std::string id;  // qualified type name or method signature

  friend auto operator<=>(const EntityRef&, const EntityRef&) = default;
};

enum class Comparison { AtLeast, AtMost, Above, Equal };

inline std::string_view symbol(Comparison op) {
  switch (op) {
    case Comparison::AtLeast: return "\xE2\x89\xA5";  // ≥
    case Comparison::AtMost: return "\xE2\x89\xA4";   // ≤
    case Comparison::Above: return ">";
    case Comparison::Equal: return "=";
  }
  return "?";
}

inline std::string_view to_string(Comparison op) {
  switch (op) {
    case Comparison::AtLeast: return ">=";
    case Comparison::AtMost: return "<=";
    case Comparison::Above: return ">";
    case Comparison::Equal: return "==";
  }
  return "?";
}

inline bool holds(Comparison op, double value, double threshold) {
  switch (op) {
    case Comparison::AtLeast: return value >= threshold;
    case Comparison::AtMost: return value <= threshold;
    case Comparison::Above: return value > threshold;
    case Comparison::Equal: return value == threshold;
  }
  return false;
}

struct Trigger {
  std::string metric;
  double value = 0;
  double threshold = 0;
  Comparison op = Comparison::AtLeast;

  friend bool operator==(const Trigger&, const Trigger&) = default;
};

inline bool smell_targets(SmellKind smell, EntityKind kind) {
  switch (smell) {
    case SmellKind::LongParameterList:
    case SmellKind::FeatureEnvy:
      return kind == EntityKind::Method;
    case SmellKind::DataClass:
    case SmellKind::GodClass:
    case SmellKind::MiddleMan:
    case SmellKind::RefusedBequest:
      return kind == EntityKind::Type;
    case SmellKind::PrimitiveObsession:
    case SmellKind::SpeculativeGenerality:
      return true;
  }
  return false;
}

inline std::string stable_candidate_id(SmellKind smell, const EntityRef& entity,
                                       const std::string& file) {
  return Fnv1a().field(to_string(smell)).field(entity.id).field(file).hex();
}

/// A suspected smell occurrence awaiting human validation. Construction
/// enforces the invariants; there is no way to hold an invalid candidate.
class SmellCandidate {
 public:
  static SmellCandidate create(SmellKind smell, EntityRef entity,
                               std::string file, LineRange span,
                               std::vector<Trigger> triggers) {
    if (triggers.empty()) {
      throw Error(ErrorCode::InvalidCandidate,
                  "candidate for " + entity.id + " has no triggering metric");
    }
    if (!smell_targets(smell, entity.kind)) {
      throw Error(ErrorCode::InvalidCandidate,
                  std::string(display_name(smell)) + " cannot target " +
                      (entity.kind == EntityKind::Type ? "a type" : "a method"));
    }
    if (span.empty()) {
      throw Error(ErrorCode::InvalidCandidate,
                  "candidate for " + entity.id + " has an empty span");
    }
    std::stable_sort(triggers.begin(), triggers.end(),
                     [](const Trigger& a, const Trigger& b) {
                       return a.metric < b.metric;
                     });
    SmellCandidate c;
    c.id_ = stable_candidate_id(smell, entity, file);
    c.smell_ = smell;
    c.entity_ = std::move(entity);
    c.file_ = std::move(file);
    c.span_ = span;
    c.triggers_ = std::move(triggers);
    return c;
  }

  const std::string& id() const { return id_; }
  SmellKind smell() const { return smell_; }
  const EntityRef& entity() const { return entity_; }
  const std::string& file() const { return file_; }
  const LineRange& sourceSpan() const { return span_; }
  const std::vector<Trigger>& triggeredBy() const { return triggers_; }

  friend bool operator==(const SmellCandidate&, const SmellCandidate&) = default;

 private:
  SmellCandidate() = default;
  std::string id_;
  SmellKind smell_ = SmellKind::DataClass;
  EntityRef entity_;
  std::string file_;
  LineRange span_;
  std::vector<Trigger> triggers_;
};

namespace detail {

class CandidateBuilder {
 public:
  CandidateBuilder(SmellKind smell, EntityRef entity, std::string file,
                   LineRange span)
      : smell_(smell), entity_(std::move(entity)), file_(std::move(file)),
        span_(span) {}

  void add(std::string_view metric, double value, double threshold,
           Comparison op) {
    if (std::none_of(triggers_.begin(), triggers_.end(),
                     [&](const Trigger& t) { return t.metric == metric; })) {
      triggers_.push_back({std::string(metric), value, threshold, op});
    }
  }
  bool empty() const { return triggers_.empty(); }
  SmellCandidate build() && {
    return SmellCandidate::create(smell_, std::move(entity_), std::move(file_),
                                  span_, std::move(triggers_));
  }

 private:
  SmellKind smell_;
  EntityRef entity_;
  std::string file_;
  LineRange span_;
  std::vector<Trigger> triggers_;
};

inline std::size_t smell_order(SmellKind k) { return static_cast<std::size_t>(k); }

}  // namespace detail

/// Applies the threshold rules to every type and method of the model.
inline std::vector<SmellCandidate> detect(const ProjectModel& model,
                                          const DetectionConfig& cfg = {}) {
  cfg.validate();
  std::vector<SmellCandidate> out;
  using detail::CandidateBuilder;

  for (const auto& [qn, loc] : model.typeIndex) {
    const TypeDecl& t = model.type(qn);
    const std::string& file = model.units[loc.unit].path;
    const MetricSet tm = compute_type_metrics(model, qn);
    const EntityRef type_ref{EntityKind::Type, qn};
    const bool is_class = t.kind == TypeKind::Class;
    const double nom = tm.at(metric::kNom);

    if (t.kind != TypeKind::Interface) {
      CandidateBuilder god(SmellKind::GodClass, type_ref, file, t.span);
      if (tm.at(metric::kLoc) >= cfg.godMinLoc && nom >= cfg.godMinNom) {
        god.add(metric::kLoc, tm.at(metric::kLoc), cfg.godMinLoc, Comparison::AtLeast);
        god.add(metric::kNom, nom, cfg.godMinNom, Comparison::AtLeast);
        out.push_back(std::move(god).build());
      }
    }
    if (is_class && !t.is_abstract()) {
      const double non_accessor = tm.at(metric::kNonAccessorMethodCount);
      if (nom > 0 && non_accessor <= cfg.dataMaxNonAccessor) {
        CandidateBuilder dc(SmellKind::DataClass, type_ref, file, t.span);
        dc.add(metric::kNom, nom, 0, Comparison::Above);
        dc.add(metric::kNonAccessorMethodCount, non_accessor,
               cfg.dataMaxNonAccessor, Comparison::AtMost);
        out.push_back(std::move(dc).build());
      }
    }
    if (t.kind != TypeKind::Interface) {
      const double ratio = tm.at(metric::kDelegationRatio);
      if (ratio >= cfg.middleMinDelegationRatio && nom >= cfg.middleMinNom) {
        CandidateBuilder mm(SmellKind::MiddleMan, type_ref, file, t.span);
        mm.add(metric::kDelegationRatio, ratio, cfg.middleMinDelegationRatio,
               Comparison::AtLeast);
        mm.add(metric::kNom, nom, cfg.middleMinNom, Comparison::AtLeast);
        out.push_back(std::move(mm).build());
      }
    }
    if (is_class && tm.at(metric::kHasLocalParent) == 1.0) {
      const double unused = tm.at(metric::kInheritedUnusedCount);
      const double overrides = tm.at(metric::kOverrideRatio);
      CandidateBuilder rb(SmellKind::RefusedBequest, type_ref, file, t.span);
      if (unused >= cfg.bequestMinUnusedInherited) {
        rb.add(metric::kInheritedUnusedCount, unused,
               cfg.bequestMinUnusedInherited, Comparison::AtLeast);
      }
      if (overrides >= cfg.bequestMinOverrideRatio && nom > 0) {
        rb.add(metric::kOverrideRatio, overrides, cfg.bequestMinOverrideRatio,
               Comparison::AtLeast);
      }
      if (!rb.empty()) {
        rb.add(metric::kHasLocalParent, 1, 1, Comparison::Equal);
        out.push_back(std::move(rb).build());
      }
    }
    if (t.kind != TypeKind::Interface) {
      const double prim = tm.at(metric::kPrimitiveFieldCount);
      if (prim >= cfg.primObsMinPrimitiveFields) {
        CandidateBuilder po(SmellKind::PrimitiveObsession, type_ref, file, t.span);
        po.add(metric::kPrimitiveFieldCount, prim, cfg.primObsMinPrimitiveFields,
               Comparison::AtLeast);
        out.push_back(std::move(po).build());
      }
    }
    if (t.kind != TypeKind::Enum) {
      CandidateBuilder sg(SmellKind::SpeculativeGenerality, type_ref, file, t.span);
      if (cfg.specGenEmptyType && nom == 0) {
        sg.add(metric::kNom, 0, 0, Comparison::Equal);
      }
      const double subtypes = tm.at(metric::kLocalSubtypeCount);
      if (cfg.specGenAbstractType && t.is_abstract() && subtypes <= 1) {
        sg.add(metric::kIsAbstract, 1, 1, Comparison::Equal);
        sg.add(metric::kLocalSubtypeCount, subtypes, 1, Comparison::AtMost);
      }
      if (!sg.empty()) out.push_back(std::move(sg).build());
    }

    for (const auto& method_id : model.methods_of(qn)) {
      const MethodDecl& m = model.method(method_id);
      const MetricSet mm = compute_method_metrics(model, method_id);
      const EntityRef method_ref{EntityKind::Method, method_id};
      const double params = mm.at(metric::kParamCount);

      if (params >= cfg.lplMinParams) {
        CandidateBuilder lpl(SmellKind::LongParameterList, method_ref, file, m.span);
        lpl.add(metric::kParamCount, params, cfg.lplMinParams, Comparison::AtLeast);
        out.push_back(std::move(lpl).build());
      }
      if (m.hasBody) {
        const double foreign = mm.at(metric::kForeignCallCount);
        const double own_ratio = mm.at(metric::kOwnAccessRatio);
        if (foreign >= cfg.envyMinForeignCalls && own_ratio <= cfg.envyMaxOwnRatio) {
          CandidateBuilder fe(SmellKind::FeatureEnvy, method_ref, file, m.span);
          fe.add(metric::kForeignCallCount, foreign, cfg.envyMinForeignCalls,
                 Comparison::AtLeast);
          fe.add(metric::kOwnAccessRatio, own_ratio, cfg.envyMaxOwnRatio,
                 Comparison::AtMost);
          out.push_back(std::move(fe).build());
        }
      }
      if (params >= cfg.primObsMinPrimitiveParams &&
          mm.at(metric::kPrimitiveParamRatio) == 1.0) {
        CandidateBuilder po(SmellKind::PrimitiveObsession, method_ref, file, m.span);
        po.add(metric::kParamCount, params, cfg.primObsMinPrimitiveParams,
               Comparison::AtLeast);
        po.add(metric::kPrimitiveParamRatio, 1.0, 1.0, Comparison::Equal);
        out.push_back(std::move(po).build());
      }
      if (cfg.specGenUnusedMethod && m.hasBody && !m.isConstructor &&
          mm.at(metric::kReverseRefCount) == 0 &&
          mm.at(metric::kStatementCount) == 0) {
        CandidateBuilder sg(SmellKind::SpeculativeGenerality, method_ref, file, m.span);
        sg.add(metric::kReverseRefCount, 0, 0, Comparison::Equal);
        sg.add(metric::kStatementCount, 0, 0, Comparison::Equal);
        out.push_back(std::move(sg).build());
      }
    }
  }

  std::sort(out.begin(), out.end(),
            [](const SmellCandidate& a, const SmellCandidate& b) {
              return std::make_tuple(a.file(), a.sourceSpan().first,
                                     detail::smell_order(a.smell()),
                                     a.entity().id) <
                     std::make_tuple(b.file(), b.sourceSpan().first,
                                     detail::smell_order(b.smell()),
                                     b.entity().id);
            });
  return out;
}

/// Shortest faithful rendering of a metric value.
inline std::string format_metric_value(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s = buf;
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

inline std::string explain(const SmellCandidate& c) {
  std::ostringstream out;
  out << display_name(c.smell()) << " candidate: " << c.entity().id << " ("
      << c.file() << ":" << c.sourceSpan().first << "-" << c.sourceSpan().last
      << ")\n";
  for (const auto& t : c.triggeredBy()) {
    out << "  " << t.metric << ' ' << format_metric_value(t.value) << ' '
        << symbol(t.op) << ' ' << format_metric_value(t.threshold) << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// candidates.json

inline nlohmann::json candidate_to_json(const SmellCandidate& c) {
  auto triggers = nlohmann::json::array();
  for (const auto& t : c.triggeredBy()) {
    triggers.push_back({{"metric", t.metric},
                        {"value", t.value},
                        {"threshold", t.threshold},
                        {"op", to_string(t.op)}});
  }
  return {{"id", c.id()},
          {"smell", to_string(c.smell())},
          {"entity",
           {{"kind", c.entity().kind == EntityKind::Type ? "type" : "method"},
            {"id", c.entity().id}}},
          {"file", c.file()},
          {"span", {c.sourceSpan().first, c.sourceSpan().last}},
          {"triggeredBy", std::move(triggers)}};
}

inline SmellCandidate candidate_from_json(const nlohmann::json& j) {
  try {
    auto parse_op = [](const std::string& s) {
      for (auto op : {Comparison::AtLeast, Comparison::AtMost,
                      Comparison::Above, Comparison::Equal}) {
        if (s == to_string(op)) return op;
      }
      throw Error(ErrorCode::SchemaViolation, "unknown comparison '" + s + "'");
    };
    std::vector<Trigger> triggers;
    for (const auto& t : j.at("triggeredBy")) {
      triggers.push_back({t.at("metric").get<std::string>(),
                          t.at("value").get<double>(),
                          t.at("threshold").get<double>(),
                          parse_op(t.at("op").get<std::string>())});
    }
    const auto& e = j.at("entity");
    const auto kind_text = e.at("kind").get<std::string>();
    if (kind_text != "type" && kind_text != "method") {
      throw Error(ErrorCode::SchemaViolation, "unknown entity kind " + kind_text);
    }
    EntityRef entity{kind_text == "type" ? EntityKind::Type : EntityKind::Method,
                     e.at("id").get<std::string>()};
    LineRange span{j.at("span").at(0).get<std::size_t>(),
                   j.at("span").at(1).get<std::size_t>()};
    auto c = SmellCandidate::create(parse_smell(j.at("smell").get<std::string>()),
                                    std::move(entity),
                                    j.at("file").get<std::string>(), span,
                                    std::move(triggers));
    if (j.contains("id") && j.at("id").get<std::string>() != c.id()) {
      throw Error(ErrorCode::InvalidCandidate,
                  "candidate id " + j.at("id").get<std::string>() +
                      " does not match its content");
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaViolation,
                std::string("malformed candidate: ") + e.what());
  }
}

struct CandidateFile {
  DetectionConfig config;
  std::vector<std::string> sources;
  std::vector<SmellCandidate> candidates;
};

inline nlohmann::json candidates_to_json(const CandidateFile& file) {
  auto arr = nlohmann::json::array();
  for (const auto& c : file.candidates) arr.push_back(candidate_to_json(c));
  return {{"schemaVersion", kCandidatesSchemaVersion},
          {"config", file.config},
          {"sources", file.sources},
          {"candidates", std::move(arr)}};
}

inline CandidateFile candidates_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schemaVersion").get<int>() != kCandidatesSchemaVersion) {
      throw Error(ErrorCode::SchemaViolation, "unsupported candidates schema version");
    }
    CandidateFile file;
    file.config = config_from_json(j.value("config", nlohmann::json::object()));
    file.sources = j.value("sources", std::vector<std::string>{});
    for (const auto& c : j.at("candidates")) {
      file.candidates.push_back(candidate_from_json(c));
    }
    return file;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaViolation,
                std::string("malformed candidates file: ") + e.what());
  }
}

}  // namespace smellcheck
