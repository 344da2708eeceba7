#pragma once

#include <cctype>
#include <map>
#include <set>
#include <string>
#include <string_view>

#include "smellcheck/error.hpp"
#include "smellcheck/source_model.hpp"

namespace smellcheck {

/// Metric id -> value. Counts are stored as exact integers in a double.
class MetricSet {
 public:
  void set(std::string_view id, double value) { values_[std::string(id)] = value; }

  double at(std::string_view id) const {
    auto it = values_.find(std::string(id));
    if (it == values_.end()) {
      throw Error(ErrorCode::InvalidCandidate,
                  "metric '" + std::string(id) + "' not computed");
    }
    return it->second;
  }
  bool has(std::string_view id) const {
    return values_.count(std::string(id)) > 0;
  }
  const std::map<std::string, double>& values() const { return values_; }

  friend bool operator==(const MetricSet&, const MetricSet&) = default;

 private:
  std::map<std::string, double> values_;
};

namespace metric {
inline constexpr std::string_view kLoc = "loc";
inline constexpr std::string_view kNom = "nom";
inline constexpr std::string_view kNoa = "noa";
inline constexpr std::string_view kConstructorCount = "constructorCount";
inline constexpr std::string_view kAccessorCount = "accessorCount";
inline constexpr std::string_view kNonAccessorMethodCount = "nonAccessorMethodCount";
inline constexpr std::string_view kDelegatingMethodCount = "delegatingMethodCount";
inline constexpr std::string_view kDelegationRatio = "delegationRatio";
inline constexpr std::string_view kOverrideCount = "overrideCount";
inline constexpr std::string_view kOverrideRatio = "overrideRatio";
inline constexpr std::string_view kInheritedUnusedCount = "inheritedUnusedCount";
inline constexpr std::string_view kPrimitiveFieldCount = "primitiveFieldCount";
inline constexpr std::string_view kHasLocalParent = "hasLocalParent";
inline constexpr std::string_view kLocalSubtypeCount = "localSubtypeCount";
inline constexpr std::string_view kIsAbstract = "isAbstract";
inline constexpr std::string_view kConcreteMethodCount = "concreteMethodCount";
inline constexpr std::string_view kExternalDataRefCount = "externalDataRefCount";
inline constexpr std::string_view kExternalUseCount = "externalUseCount";

inline constexpr std::string_view kParamCount = "paramCount";
inline constexpr std::string_view kComplexParamCount = "complexParamCount";
inline constexpr std::string_view kUnusedParamCount = "unusedParamCount";
inline constexpr std::string_view kPrimitiveParamRatio = "primitiveParamRatio";
inline constexpr std::string_view kForeignCallCount = "foreignCallCount";
inline constexpr std::string_view kOwnAccessCount = "ownAccessCount";
inline constexpr std::string_view kOwnAccessRatio = "ownAccessRatio";
inline constexpr std::string_view kForeignProviderCount = "foreignProviderCount";
inline constexpr std::string_view kStatementCount = "statementCount";
inline constexpr std::string_view kHasBody = "hasBody";
inline constexpr std::string_view kReverseRefCount = "reverseRefCount";
}  // namespace metric

enum class AccessorKind { Getter, Setter, Constructor, Other };

inline std::string_view to_string(AccessorKind kind) {
  switch (kind) {
    case AccessorKind::Getter: return "getter";
    case AccessorKind::Setter: return "setter";
    case AccessorKind::Constructor: return "constructor";
    case AccessorKind::Other: return "other";
  }
  return "other";
}

namespace detail {

inline bool has_bean_prefix(std::string_view name, std::string_view prefix) {
  return name.size() > prefix.size() && name.substr(0, prefix.size()) == prefix &&
         std::isupper(static_cast<unsigned char>(name[prefix.size()]));
}

}  // namespace detail

inline AccessorKind classify_accessor(const MethodDecl& m) {
  if (m.isConstructor) return AccessorKind::Constructor;
  const BodyProfile& b = m.bodyRefs;
  const bool no_calls = b.localCallNames.empty() && b.qualifiedCalls.empty();
  if ((detail::has_bean_prefix(m.name, "get") ||
       detail::has_bean_prefix(m.name, "is")) &&
      m.params.empty() && m.hasBody && !m.bodyTokens.empty() &&
      m.bodyTokens.front() == "return" && b.statementCount == 1 &&
      b.ownFieldReads.size() == 1 && b.ownFieldWrites.empty() && no_calls) {
    return AccessorKind::Getter;
  }
  if (detail::has_bean_prefix(m.name, "set") && m.params.size() == 1 &&
      m.hasBody && b.ownFieldWrites.size() == 1 && no_calls) {
    return AccessorKind::Setter;
  }
  return AccessorKind::Other;
}

/// Field names a method body sees as its own object's state.
inline std::set<std::string> own_state_names(const TypeDecl& owner,
                                             const MethodDecl& m) {
  std::set<std::string> own;
  for (const auto& f : owner.fields) own.insert(f.name);
  for (const auto& p : m.params) own.erase(p.name);
  for (const auto& [name, type] : m.locals) own.erase(name);
  return own;
}

namespace detail {

inline double ratio(double num, double den) { return den > 0 ? num / den : 0.0; }

inline bool is_inheritable_concrete(const TypeDecl& declaring,
                                    const MethodDecl& m) {
  const bool is_public =
      m.is_public() || declaring.kind == TypeKind::Interface;
  return is_public && m.hasBody && !m.isConstructor && !m.is_static() &&
         !m.modifiers.count("abstract");
}

// Whether a reference site counts as use "from this type or its clients".
inline bool site_uses_through(const ProjectModel& model,
                              const ReferenceSite& site,
                              const std::set<std::string>& self_and_subtypes) {
  if (site.viaType.empty()) return true;  // untyped receiver; cannot exclude
  if (self_and_subtypes.count(site.viaType)) return true;
  auto it = model.methodIndex.find(site.method);
  return it != model.methodIndex.end() &&
         self_and_subtypes.count(it->second.type) > 0;
}

inline std::set<std::string> self_and_subtypes(const ProjectModel& model,
                                               const std::string& qn) {
  std::set<std::string> out{qn};
  std::vector<std::string> frontier{qn};
  while (!frontier.empty()) {
    std::vector<std::string> next;
    for (const auto& t : frontier) {
      for (const auto& s : model.local_subtypes(t)) {
        if (out.insert(s).second) next.push_back(s);
      }
    }
    frontier = std::move(next);
  }
  return out;
}

// Overrides that replace inherited behaviour, as opposed to implementing an
// abstract or interface declaration.
inline bool overrides_concrete(const ProjectModel& model, const std::string& qn,
                               const MethodDecl& m) {
  if (!m.isOverride) return false;
  for (const auto& a : model.local_ancestors(qn)) {
    const TypeDecl& at = model.type(a);
    for (const auto& am : at.methods) {
      if (am.name == m.name && am.params.size() == m.params.size() &&
          am.hasBody && !am.isConstructor && !am.modifiers.count("abstract")) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace detail

/// Inherited concrete public methods nobody reaches through this type.
inline std::vector<std::string> inherited_unused_methods(const ProjectModel& model,
                                                         const std::string& qn) {
  std::vector<std::string> out;
  const TypeDecl& t = model.type(qn);
  std::set<std::pair<std::string, std::size_t>> shadowed;
  for (const auto& m : t.methods) shadowed.insert({m.name, m.params.size()});
  auto users = detail::self_and_subtypes(model, qn);
  for (const auto& ancestor : model.local_ancestors(qn)) {
    const TypeDecl& a = model.type(ancestor);
    for (const auto& m : a.methods) {
      if (!shadowed.insert({m.name, m.params.size()}).second) continue;
      if (!detail::is_inheritable_concrete(a, m)) continue;
      const auto& sites = model.refs_to(member_key(ancestor, m.name));
      bool used = std::any_of(sites.begin(), sites.end(), [&](const auto& s) {
        return detail::site_uses_through(model, s, users);
      });
      if (!used) out.push_back(method_signature(ancestor, m));
    }
  }
  return out;
}

/// Distinct other project types that mention this type or reach its members.
inline std::set<std::string> external_users(const ProjectModel& model,
                                            const std::string& qn) {
  std::set<std::string> users;
  if (auto it = model.typeUses.find(qn); it != model.typeUses.end()) {
    users = it->second;
  }
  const TypeDecl& t = model.type(qn);
  auto collect = [&](const std::string& member) {
    for (const auto& site : model.refs_to(member_key(qn, member))) {
      const auto& owner = model.owner_of(site.method);
      if (owner != qn) users.insert(owner);
    }
  };
  for (const auto& f : t.fields) collect(f.name);
  for (const auto& m : t.methods) collect(m.name);
  users.erase(qn);
  return users;
}

/// Methods outside the type that read or write its fields or call its accessors.
inline std::set<std::string> external_data_referrers(const ProjectModel& model,
                                                     const std::string& qn) {
  std::set<std::string> out;
  const TypeDecl& t = model.type(qn);
  auto collect = [&](const std::string& member) {
    for (const auto& site : model.refs_to(member_key(qn, member))) {
      if (model.owner_of(site.method) != qn) out.insert(site.method);
    }
  };
  for (const auto& f : t.fields) collect(f.name);
  for (const auto& m : t.methods) {
    auto kind = classify_accessor(m);
    if (kind == AccessorKind::Getter || kind == AccessorKind::Setter) {
      collect(m.name);
    }
  }
  return out;
}

inline MetricSet compute_type_metrics(const ProjectModel& model,
                                      const std::string& qn) {
  const TypeDecl& t = model.type(qn);  // throws UnknownType
  MetricSet ms;
  double nom = 0, ctors = 0, accessors = 0, delegating = 0, overrides = 0,
         concrete = 0;
  for (const auto& m : t.methods) {
    auto kind = classify_accessor(m);
    if (kind == AccessorKind::Constructor) {
      ++ctors;
      continue;
    }
    ++nom;
    if (kind == AccessorKind::Getter || kind == AccessorKind::Setter) ++accessors;
    if (m.bodyRefs.forwardsTo) ++delegating;
    if (detail::overrides_concrete(model, qn, m)) ++overrides;
    if (m.hasBody) ++concrete;
  }
  double primitive_fields = 0;
  for (const auto& f : t.fields) {
    // constants are not state
    if (f.isPrimitive && !(f.modifiers.count("static") && f.modifiers.count("final"))) {
      ++primitive_fields;
    }
  }
  ms.set(metric::kLoc, static_cast<double>(t.span.length()));
  ms.set(metric::kNom, nom);
  ms.set(metric::kNoa, static_cast<double>(t.fields.size()));
  ms.set(metric::kConstructorCount, ctors);
  ms.set(metric::kAccessorCount, accessors);
  ms.set(metric::kNonAccessorMethodCount, nom - accessors);
  ms.set(metric::kDelegatingMethodCount, delegating);
  ms.set(metric::kDelegationRatio, detail::ratio(delegating, nom));
  ms.set(metric::kOverrideCount, overrides);
  ms.set(metric::kOverrideRatio, detail::ratio(overrides, nom));
  ms.set(metric::kInheritedUnusedCount,
         static_cast<double>(inherited_unused_methods(model, qn).size()));
  ms.set(metric::kPrimitiveFieldCount, primitive_fields);
  ms.set(metric::kHasLocalParent,
         model.local_superclass(qn) ? 1.0 : 0.0);
  ms.set(metric::kLocalSubtypeCount,
         static_cast<double>(model.local_subtypes(qn).size()));
  ms.set(metric::kIsAbstract, t.is_abstract() ? 1.0 : 0.0);
  ms.set(metric::kConcreteMethodCount, concrete);
  ms.set(metric::kExternalDataRefCount,
         static_cast<double>(external_data_referrers(model, qn).size()));
  ms.set(metric::kExternalUseCount,
         static_cast<double>(external_users(model, qn).size()));
  return ms;
}

/// Distinct methods other than `method_id` itself that reference it by name,
/// including calls reaching it through an overridden ancestor declaration.
inline std::set<std::string> method_referrers(const ProjectModel& model,
                                              const std::string& method_id) {
  const MethodDecl& m = model.method(method_id);
  const std::string& owner = model.owner_of(method_id);
  std::set<std::string> out;
  auto collect = [&](const std::string& type_qn) {
    for (const auto& site : model.refs_to(member_key(type_qn, m.name))) {
      if (site.method != method_id) out.insert(site.method);
    }
  };
  collect(owner);
  if (m.isOverride) {
    for (const auto& a : model.local_ancestors(owner)) collect(a);
  }
  return out;
}

inline MetricSet compute_method_metrics(const ProjectModel& model,
                                        const std::string& method_id) {
  const MethodDecl& m = model.method(method_id);  // throws UnknownMethod
  const TypeDecl& owner = model.type(model.owner_of(method_id));
  const BodyProfile& b = m.bodyRefs;
  MetricSet ms;

  double complex = 0, unused = 0, primitive = 0;
  for (const auto& p : m.params) {
    if (!p.isPrimitive) ++complex;
    else ++primitive;
    if (m.hasBody && !p.usedInBody) ++unused;
  }
  auto own = own_state_names(owner, m);
  double foreign_calls = 0;
  std::set<std::string> providers;
  for (const auto& q : b.qualifiedCalls) {
    if (own.count(q.receiver)) continue;
    ++foreign_calls;
    providers.insert(q.receiver);
  }
  for (const auto& q : b.foreignAccesses) {
    if (!own.count(q.receiver)) providers.insert(q.receiver);
  }
  const double own_access = static_cast<double>(
      b.ownFieldReads.size() + b.ownFieldWrites.size() + b.localCallNames.size());
  const double params = static_cast<double>(m.params.size());

  ms.set(metric::kParamCount, params);
  ms.set(metric::kComplexParamCount, complex);
  ms.set(metric::kUnusedParamCount, unused);
  ms.set(metric::kPrimitiveParamRatio, detail::ratio(primitive, params));
  ms.set(metric::kForeignCallCount, foreign_calls);
  ms.set(metric::kOwnAccessCount, own_access);
  ms.set(metric::kOwnAccessRatio,
         own_access + foreign_calls > 0 ? own_access / (own_access + foreign_calls)
                                        : 1.0);
  ms.set(metric::kForeignProviderCount,
         static_cast<double>(providers.size()));
  ms.set(metric::kStatementCount, static_cast<double>(b.statementCount));
  ms.set(metric::kLoc, static_cast<double>(m.span.length()));
  ms.set(metric::kHasBody, m.hasBody ? 1.0 : 0.0);
  ms.set(metric::kReverseRefCount,
         static_cast<double>(method_referrers(model, method_id).size()));
  return ms;
}

}  // namespace smellcheck
