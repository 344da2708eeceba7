#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "smellcheck/detector.hpp"
#include "smellcheck/metrics.hpp"
#include "smellcheck/smell_kind.hpp"

namespace smellcheck {

inline constexpr int kCatalogSchemaVersion = 1;

/// How an item's evidence is produced: computed, shown as context for a
/// human call, or left entirely to the reviewer.
enum class ItemMode { Auto, Assistive, Judgment };

enum class Answer { Yes, No };

enum class Finding { Yes, No, Indeterminate, HumanOnly };

inline std::string_view to_string(ItemMode m) {
  switch (m) {
    case ItemMode::Auto: return "auto";
    case ItemMode::Assistive: return "assistive";
    case ItemMode::Judgment: return "judgment";
  }
  return "judgment";
}

inline std::string_view to_string(Answer a) { return a == Answer::Yes ? "yes" : "no"; }

inline std::string_view to_string(Finding f) {
  switch (f) {
    case Finding::Yes: return "yes";
    case Finding::No: return "no";
    case Finding::Indeterminate: return "indeterminate";
    case Finding::HumanOnly: return "humanOnly";
  }
  return "humanOnly";
}

struct ValidationItem {
  std::string_view id;
  SmellKind smell;
  std::string_view text;
  ItemMode mode;
  Answer polarity;  // the answer that supports accepting the smell
  bool derived = false;
};

namespace detail {

using enum ItemMode;
using enum Answer;

// Table order within each smell; the SG block is derived (no table source).
inline constexpr ValidationItem kCatalog[] = {
    {"DC-1", SmellKind::DataClass,
     "Does the class have other methods than getters and setters?", Auto, No},
    {"DC-2", SmellKind::DataClass,
     "Does the class have other methods than its constructor?", Auto, No},
    {"DC-3", SmellKind::DataClass,
     "Is the class data being externally manipulated?", Auto, Yes},
    {"FE-1", SmellKind::FeatureEnvy,
     "Does the method call external methods too frequently?", Auto, Yes},
    {"FE-2", SmellKind::FeatureEnvy,
     "Can you visualize an alternative implementation of this method focused "
     "on manipulating its own data?",
     Judgment, Yes},
    {"GC-1", SmellKind::GodClass,
     "Does the class have clear responsibilities from other classes?",
     Judgment, No},
    {"GC-2", SmellKind::GodClass,
     "Does it make sense for you to split this class into two or more "
     "classes?",
     Judgment, Yes},
    {"GC-3", SmellKind::GodClass,
     "Does the class size hinder its readability/comprehensibility?",
     Assistive, Yes},
    {"LPL-1", SmellKind::LongParameterList,
     "Does the method signature have too many parameters?", Auto, Yes},
    {"LPL-2", SmellKind::LongParameterList,
     "Are there too many parameters composed of complex types?", Auto, Yes},
    {"LPL-3", SmellKind::LongParameterList,
     "Do the parameters' names contribute to reaching a clear understanding "
     "of their purpose?",
     Judgment, No},
    {"LPL-4", SmellKind::LongParameterList,
     "Does the method actually use all its parameters?", Auto, No},
    {"LPL-5", SmellKind::LongParameterList,
     "Are all parameters actually needed?", Judgment, No},
    {"LPL-6", SmellKind::LongParameterList,
     "May the parameters be passed more simply?", Judgment, Yes},
    {"MM-1", SmellKind::MiddleMan,
     "Does the class perform any relevant logical task?", Judgment, No},
    {"MM-2", SmellKind::MiddleMan,
     "Does the class clearly delegate its responsibilities to other classes?",
     Auto, Yes},
    {"PO-1", SmellKind::PrimitiveObsession,
     "Does replacing one or more primitive variables with objects sound to be "
     "the best choice?",
     Judgment, Yes},
    {"PO-2", SmellKind::PrimitiveObsession,
     "May two or more variables be consolidated into a single complex type?",
     Judgment, Yes},
    {"RB-1", SmellKind::RefusedBequest,
     "Does the inheritance conceptually make sense?", Judgment, No},
    {"RB-2", SmellKind::RefusedBequest,
     "Does the class inherit methods never used?", Auto, Yes},
    {"RB-3", SmellKind::RefusedBequest,
     "Does the class inherit methods that are not adherent with its "
     "definition?",
     Judgment, Yes},
    {"RB-4", SmellKind::RefusedBequest,
     "Are there too many methods being overridden?", Auto, Yes},
    {"SG-1", SmellKind::SpeculativeGenerality,
     "Does the class lack any concrete methods?", Auto, Yes, true},
    {"SG-2", SmellKind::SpeculativeGenerality,
     "Is the inheritance relationship actually needed today?", Judgment, No,
     true},
    {"SG-3", SmellKind::SpeculativeGenerality,
     "Is the element used anywhere outside its own declaration?", Auto, No,
     true},
    {"SG-4", SmellKind::SpeculativeGenerality,
     "Does the element carry responsibilities beyond accommodating future "
     "features?",
     Judgment, No, true},
};

}  // namespace detail

inline std::span<const ValidationItem> all_items() { return detail::kCatalog; }

inline std::vector<ValidationItem> items_for(SmellKind smell) {
  std::vector<ValidationItem> out;
  for (const auto& item : detail::kCatalog) {
    if (item.smell == smell) out.push_back(item);
  }
  return out;
}

inline std::vector<ValidationItem> items_for(std::string_view smell_name) {
  return items_for(parse_smell(smell_name));
}

inline const ValidationItem& find_item(std::string_view id) {
  for (const auto& item : detail::kCatalog) {
    if (item.id == id) return item;
  }
  throw Error(ErrorCode::UnknownItem, "unknown validation item " + std::string(id));
}

/// Whether a finding speaks for acceptance; nullopt when it takes no side.
inline std::optional<bool> supports_acceptance(const ValidationItem& item,
                                               Finding f) {
  if (f == Finding::Yes) return item.polarity == Answer::Yes;
  if (f == Finding::No) return item.polarity == Answer::No;
  return std::nullopt;
}

struct Fact {
  std::string label;
  std::string value;

  friend bool operator==(const Fact&, const Fact&) = default;
};

struct EvidenceResult {
  std::string item;
  Finding finding = Finding::HumanOnly;
  std::vector<Fact> facts;
  std::vector<std::string> computedFrom;
};

namespace detail {

inline std::string join(const std::vector<std::string>& parts,
                        std::string_view sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

inline std::string num(double v) { return format_metric_value(v); }

// Leading camelCase / snake_case word, lowercased.
inline std::string name_prefix(std::string_view name) {
  std::string out;
  for (std::size_t i = 0; i < name.size(); ++i) {
    auto c = static_cast<unsigned char>(name[i]);
    if (c == '_' && !out.empty()) break;
    if (i > 0 && std::isupper(c) && !out.empty()) break;
    if (c != '_') out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

/// Names sharing a leading word, one fact per group of two or more.
inline std::vector<Fact> prefix_groups(const std::vector<std::string>& names,
                                       std::string_view label) {
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& n : names) groups[name_prefix(n)].push_back(n);
  std::vector<Fact> facts;
  for (const auto& [prefix, members] : groups) {
    if (members.size() >= 2) {
      facts.push_back({std::string(label) + " '" + prefix + "'", join(members)});
    }
  }
  if (facts.empty()) facts.push_back({std::string(label), "none"});
  return facts;
}

inline std::vector<Fact> method_clusters(const TypeDecl& t) {
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& m : t.methods) {
    if (!m.isConstructor) groups[name_prefix(m.name)].push_back(m.name);
  }
  std::vector<Fact> facts;
  for (const auto& [prefix, members] : groups) {
    facts.push_back({"cluster '" + prefix + "'", join(members)});
  }
  return facts;
}

inline Finding yes_if(bool condition) { return condition ? Finding::Yes : Finding::No; }

}  // namespace detail

/// Evidence for one validation item on one candidate. Auto findings are
/// functions of the metric values named in computedFrom; facts add context.
inline EvidenceResult evaluate_evidence(const ProjectModel& model,
                                        const SmellCandidate& c,
                                        const ValidationItem& item,
                                        const DetectionConfig& cfg = {}) {
  using detail::num;
  using detail::yes_if;
  if (item.smell != c.smell()) {
    throw Error(ErrorCode::UnknownItem,
                std::string(item.id) + " does not apply to " +
                    std::string(display_name(c.smell())));
  }
  const bool is_method = c.entity().kind == EntityKind::Method;
  if (is_method ? !model.methodIndex.count(c.entity().id)
                : !model.has_type(c.entity().id)) {
    throw Error(ErrorCode::EntityVanished,
                c.entity().id + " is no longer present in the model");
  }
  const std::string type_qn =
      is_method ? model.owner_of(c.entity().id) : c.entity().id;
  const TypeDecl& type = model.type(type_qn);
  const MetricSet tm = compute_type_metrics(model, type_qn);
  const MetricSet mm =
      is_method ? compute_method_metrics(model, c.entity().id) : MetricSet{};
  const MethodDecl* method = is_method ? &model.method(c.entity().id) : nullptr;

  EvidenceResult r;
  r.item = std::string(item.id);
  r.finding = Finding::HumanOnly;
  auto from = [&](std::initializer_list<std::string_view> ids) {
    for (auto id : ids) r.computedFrom.emplace_back(id);
  };
  auto primitive_names = [&]() {
    std::vector<std::string> names;
    if (method) {
      for (const auto& p : method->params) {
        if (p.isPrimitive) names.push_back(p.name);
      }
    } else {
      for (const auto& f : type.fields) {
        if (f.isPrimitive) names.push_back(f.name);
      }
    }
    return names;
  };

  const std::string_view id = item.id;
  if (id == "DC-1") {
    const double v = tm.at(metric::kNonAccessorMethodCount);
    r.finding = yes_if(v > 0);
    r.facts = {{"non-accessor methods", num(v)}};
    from({metric::kNonAccessorMethodCount});
  } else if (id == "DC-2") {
    const double nom = tm.at(metric::kNom);
    r.finding = yes_if(nom > 0);
    r.facts = {{"methods besides constructors", num(nom)},
               {"constructors", num(tm.at(metric::kConstructorCount))}};
    from({metric::kNom});
  } else if (id == "DC-3") {
    const double v = tm.at(metric::kExternalDataRefCount);
    r.finding = yes_if(v > 0);
    r.facts = {{"external methods touching fields or accessors", num(v)}};
    auto referrers = external_data_referrers(model, type_qn);
    if (!referrers.empty()) {
      r.facts.push_back({"referenced from",
                         detail::join({referrers.begin(), referrers.end()})});
    }
    from({metric::kExternalDataRefCount});
  } else if (id == "FE-1") {
    const double calls = mm.at(metric::kForeignCallCount);
    r.finding = yes_if(calls >= cfg.envyMinForeignCalls);
    r.facts = {{"external calls", num(calls)},
               {"distinct external providers", num(mm.at(metric::kForeignProviderCount))},
               {"own data accesses", num(mm.at(metric::kOwnAccessCount))}};
    from({metric::kForeignCallCount, metric::kForeignProviderCount});
  } else if (id == "FE-2") {
    r.facts = {{"own data accesses", num(mm.at(metric::kOwnAccessCount))}};
    auto own = own_state_names(type, *method);
    std::map<std::string, int> per_receiver;
    for (const auto& q : method->bodyRefs.qualifiedCalls) {
      if (!own.count(q.receiver)) ++per_receiver[q.receiver];
    }
    for (const auto& q : method->bodyRefs.foreignAccesses) {
      if (!own.count(q.receiver)) ++per_receiver[q.receiver];
    }
    for (const auto& [recv, n] : per_receiver) {
      r.facts.push_back({"uses of '" + recv + "'", std::to_string(n)});
    }
  } else if (id == "GC-1") {
    r.facts = detail::method_clusters(type);
  } else if (id == "GC-2") {
    r.facts = {{"methods", num(tm.at(metric::kNom))},
               {"fields", num(tm.at(metric::kNoa))},
               {"method-name clusters",
                std::to_string(detail::method_clusters(type).size())}};
  } else if (id == "GC-3") {
    r.finding = Finding::Indeterminate;
    r.facts = {{"lines of code", num(tm.at(metric::kLoc))},
               {"methods", num(tm.at(metric::kNom))}};
    from({metric::kLoc, metric::kNom});
  } else if (id == "LPL-1") {
    const double v = mm.at(metric::kParamCount);
    r.finding = yes_if(v >= cfg.lplMinParams);
    r.facts = {{"parameters", num(v)}};
    from({metric::kParamCount});
  } else if (id == "LPL-2") {
    const double complex = mm.at(metric::kComplexParamCount);
    const double total = mm.at(metric::kParamCount);
    r.finding = yes_if(complex > total - complex);
    std::vector<std::string> names;
    for (const auto& p : method->params) {
      if (!p.isPrimitive) names.push_back(p.name + ": " + p.typeName);
    }
    r.facts = {{"complex-typed parameters", num(complex)},
               {"parameters", num(total)}};
    if (!names.empty()) r.facts.push_back({"complex", detail::join(names)});
    from({metric::kComplexParamCount, metric::kParamCount});
  } else if (id == "LPL-3") {
    for (const auto& p : method->params) r.facts.push_back({p.name, p.typeName});
  } else if (id == "LPL-4") {
    const double unused = mm.at(metric::kUnusedParamCount);
    r.finding = mm.at(metric::kHasBody) == 0.0 ? Finding::Indeterminate
                                               : yes_if(unused == 0);
    r.facts = {{"unused parameters", num(unused)}};
    from({metric::kUnusedParamCount, metric::kHasBody});
  } else if (id == "LPL-5") {
    std::vector<std::string> unused, used;
    for (const auto& p : method->params) {
      (p.usedInBody ? used : unused).push_back(p.name);
    }
    r.facts = {{"unused", unused.empty() ? "none" : detail::join(unused)},
               {"used", used.empty() ? "none" : detail::join(used)}};
  } else if (id == "LPL-6") {
    r.facts = detail::prefix_groups(primitive_names(), "primitive parameters sharing");
    std::vector<std::string> complex;
    for (const auto& p : method->params) {
      if (!p.isPrimitive) complex.push_back(p.name + ": " + p.typeName);
    }
    if (!complex.empty()) r.facts.push_back({"complex", detail::join(complex)});
  } else if (id == "MM-1") {
    std::vector<std::string> logic;
    for (const auto& m : type.methods) {
      if (!m.isConstructor && !m.bodyRefs.forwardsTo) logic.push_back(m.name);
    }
    r.facts = {{"methods doing more than forwarding",
                logic.empty() ? "none" : detail::join(logic)}};
  } else if (id == "MM-2") {
    const double ratio = tm.at(metric::kDelegationRatio);
    r.finding = yes_if(ratio >= cfg.middleMinDelegationRatio);
    r.facts = {{"forwarding methods",
                num(tm.at(metric::kDelegatingMethodCount)) + " of " +
                    num(tm.at(metric::kNom))},
               {"delegation ratio", num(ratio)}};
    std::vector<std::string> targets;
    for (const auto& m : type.methods) {
      if (m.bodyRefs.forwardsTo) {
        targets.push_back(m.name + " -> " + m.bodyRefs.forwardsTo->receiver +
                          "." + m.bodyRefs.forwardsTo->member);
      }
    }
    if (!targets.empty()) r.facts.push_back({"forwards", detail::join(targets)});
    from({metric::kDelegationRatio});
  } else if (id == "PO-1") {
    auto names = primitive_names();
    r.facts = {{method ? "primitive parameters" : "primitive fields",
                names.empty() ? "none" : detail::join(names)}};
  } else if (id == "PO-2") {
    r.facts = detail::prefix_groups(primitive_names(), "primitives sharing");
  } else if (id == "RB-1") {
    r.facts = {{"parent", type.superclass.value_or("none")}};
    std::vector<std::string> overrides;
    for (const auto& m : type.methods) {
      if (m.isOverride) overrides.push_back(m.name);
    }
    r.facts.push_back({"overrides", overrides.empty() ? "none" : detail::join(overrides)});
  } else if (id == "RB-2") {
    const double v = tm.at(metric::kInheritedUnusedCount);
    r.finding = yes_if(v > 0);
    r.facts = {{"inherited methods never used", num(v)}};
    auto unused = inherited_unused_methods(model, type_qn);
    if (!unused.empty()) r.facts.push_back({"unused", detail::join(unused)});
    from({metric::kInheritedUnusedCount});
  } else if (id == "RB-3") {
    std::vector<std::string> inherited;
    std::set<std::string> own_names;
    for (const auto& m : type.methods) own_names.insert(m.name);
    for (const auto& a : model.local_ancestors(type_qn)) {
      for (const auto& m : model.type(a).methods) {
        if (!m.isConstructor && !own_names.count(m.name) &&
            !m.modifiers.count("private")) {
          inherited.push_back(detail::simple_name(a) + "." + m.name);
        }
      }
    }
    r.facts = {{"inherited methods", inherited.empty() ? "none" : detail::join(inherited)}};
  } else if (id == "RB-4") {
    const double nom = tm.at(metric::kNom);
    const double ratio = tm.at(metric::kOverrideRatio);
    r.finding = nom == 0 ? Finding::Indeterminate
                         : yes_if(ratio >= cfg.bequestMinOverrideRatio);
    r.facts = {{"overridden methods",
                num(tm.at(metric::kOverrideCount)) + " of " + num(nom)}};
    from({metric::kOverrideRatio, metric::kNom});
  } else if (id == "SG-1") {
    const double concrete = tm.at(metric::kConcreteMethodCount);
    r.finding = yes_if(concrete == 0);
    r.facts = {{"concrete methods", num(concrete)}, {"methods", num(tm.at(metric::kNom))}};
    from({metric::kConcreteMethodCount});
  } else if (id == "SG-2") {
    auto subtypes = model.local_subtypes(type_qn);
    r.facts = {{"parent", type.superclass.value_or("none")},
               {"project subtypes", subtypes.empty() ? "none" : detail::join(subtypes)}};
  } else if (id == "SG-3") {
    if (method) {
      const double refs = mm.at(metric::kReverseRefCount);
      r.finding = yes_if(refs > 0);
      r.facts = {{"referencing methods", num(refs)}};
      from({metric::kReverseRefCount});
    } else {
      const double users = tm.at(metric::kExternalUseCount);
      r.finding = yes_if(users > 0);
      r.facts = {{"types using it", num(users)}};
      auto names = external_users(model, type_qn);
      if (!names.empty()) r.facts.push_back({"used by", detail::join({names.begin(), names.end()})});
      from({metric::kExternalUseCount});
    }
  } else if (id == "SG-4") {
    if (method) {
      r.facts = {{"statements", num(mm.at(metric::kStatementCount))},
                 {"referencing methods", num(mm.at(metric::kReverseRefCount))}};
    } else {
      r.facts = {{"methods", num(tm.at(metric::kNom))},
                 {"concrete methods", num(tm.at(metric::kConcreteMethodCount))}};
    }
  }
  if (item.mode == ItemMode::Judgment) r.finding = Finding::HumanOnly;
  return r;
}

inline std::vector<EvidenceResult> evaluate_all(const ProjectModel& model,
                                                const SmellCandidate& c,
                                                const DetectionConfig& cfg = {}) {
  std::vector<EvidenceResult> out;
  for (const auto& item : items_for(c.smell())) {
    out.push_back(evaluate_evidence(model, c, item, cfg));
  }
  return out;
}

inline nlohmann::json item_to_json(const ValidationItem& item) {
  return {{"id", item.id},
          {"smell", to_string(item.smell)},
          {"text", item.text},
          {"mode", to_string(item.mode)},
          {"polarity", to_string(item.polarity)},
          {"derived", item.derived}};
}

inline nlohmann::json evidence_to_json(const EvidenceResult& r) {
  auto facts = nlohmann::json::array();
  for (const auto& f : r.facts) facts.push_back({{"label", f.label}, {"value", f.value}});
  return {{"item", r.item},
          {"finding", to_string(r.finding)},
          {"facts", std::move(facts)},
          {"computedFrom", r.computedFrom}};
}

inline nlohmann::json catalog_to_json() {
  auto items = nlohmann::json::array();
  for (const auto& item : all_items()) items.push_back(item_to_json(item));
  return {{"schemaVersion", kCatalogSchemaVersion}, {"items", std::move(items)}};
}

}  // namespace smellcheck
