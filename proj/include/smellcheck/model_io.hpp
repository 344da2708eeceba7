#pragma once

#include <sstream>
#include <string>

#include "json.hpp"
#include "smellcheck/source_model.hpp"

namespace smellcheck {

inline constexpr int kModelSchemaVersion = 1;

namespace detail {

inline nlohmann::json refs_json(const std::multiset<QualifiedRef>& refs) {
  auto out = nlohmann::json::array();
  for (const auto& r : refs) out.push_back({r.receiver, r.member});
  return out;
}

inline nlohmann::json type_json(const TypeDecl& t, bool with_positions) {
  nlohmann::json j;
  j["name"] = t.name;
  j["qualifiedName"] = t.qualifiedName;
  j["kind"] = to_string(t.kind);
  j["modifiers"] = t.modifiers;
  j["superclass"] = t.superclass ? nlohmann::json(*t.superclass) : nullptr;
  j["interfaces"] = t.interfaces;
  auto fields = nlohmann::json::array();
  for (const auto& f : t.fields) {
    nlohmann::json fj{{"name", f.name},
                      {"typeName", f.typeName},
                      {"modifiers", f.modifiers},
                      {"isPrimitive", f.isPrimitive}};
    if (with_positions) fj["line"] = f.line;
    fields.push_back(std::move(fj));
  }
  j["fields"] = std::move(fields);
  auto methods = nlohmann::json::array();
  for (const auto& m : t.methods) {
    nlohmann::json mj;
    mj["name"] = m.name;
    auto params = nlohmann::json::array();
    for (const auto& p : m.params) {
      params.push_back({{"name", p.name},
                        {"typeName", p.typeName},
                        {"isPrimitive", p.isPrimitive},
                        {"usedInBody", p.usedInBody}});
    }
    mj["params"] = std::move(params);
    mj["returnType"] = m.returnType ? nlohmann::json(*m.returnType) : nullptr;
    mj["modifiers"] = m.modifiers;
    mj["isConstructor"] = m.isConstructor;
    mj["isOverride"] = m.isOverride;
    mj["hasBody"] = m.hasBody;
    const auto& b = m.bodyRefs;
    nlohmann::json bj{{"localCallNames", b.localCallNames},
                      {"qualifiedCalls", refs_json(b.qualifiedCalls)},
                      {"ownFieldReads", b.ownFieldReads},
                      {"ownFieldWrites", b.ownFieldWrites},
                      {"foreignAccesses", refs_json(b.foreignAccesses)},
                      {"statementCount", b.statementCount}};
    bj["forwardsTo"] =
        b.forwardsTo
            ? nlohmann::json{b.forwardsTo->receiver, b.forwardsTo->member}
            : nlohmann::json(nullptr);
    if (with_positions) {
      bj["lineCount"] = b.lineCount;
      mj["span"] = {m.span.first, m.span.last};
    }
    mj["bodyRefs"] = std::move(bj);
    methods.push_back(std::move(mj));
  }
  j["methods"] = std::move(methods);
  auto nested = nlohmann::json::array();
  for (const auto& n : t.nested) nested.push_back(type_json(n, with_positions));
  j["nested"] = std::move(nested);
  if (with_positions) j["span"] = {t.span.first, t.span.last};
  return j;
}

}  // namespace detail

inline nlohmann::json unit_to_json(const SourceUnit& unit,
                                   bool with_positions = true) {
  nlohmann::json j;
  j["path"] = unit.path;
  j["package"] = unit.package;
  j["imports"] = unit.imports;
  auto types = nlohmann::json::array();
  for (const auto& t : unit.types) {
    types.push_back(detail::type_json(t, with_positions));
  }
  j["types"] = std::move(types);
  if (with_positions) {
    auto diags = nlohmann::json::array();
    for (const auto& d : unit.diagnostics) {
      diags.push_back({{"line", d.line}, {"message", d.message}});
    }
    j["diagnostics"] = std::move(diags);
  }
  return j;
}

/// Structure only: the part of a unit that survives a print/parse cycle.
inline nlohmann::json structural_json(const SourceUnit& unit) {
  auto j = unit_to_json(unit, false);
  j.erase("path");
  return j;
}

inline nlohmann::json model_to_json(const ProjectModel& model) {
  nlohmann::json j;
  j["schemaVersion"] = kModelSchemaVersion;
  auto units = nlohmann::json::array();
  for (const auto& u : model.units) units.push_back(unit_to_json(u));
  j["units"] = std::move(units);
  auto edges = nlohmann::json::array();
  for (const auto& e : model.inheritanceEdges) {
    edges.push_back({{"child", e.child},
                     {"parent", e.parent},
                     {"kind", e.kind == EdgeKind::Extends ? "extends"
                                                          : "implements"},
                     {"external", e.external}});
  }
  j["inheritanceEdges"] = std::move(edges);
  nlohmann::json refs = nlohmann::json::object();
  for (const auto& [member, sites] : model.reverseRefs) {
    auto arr = nlohmann::json::array();
    for (const auto& s : sites) {
      arr.push_back({{"method", s.method}, {"viaType", s.viaType}});
    }
    refs[member] = std::move(arr);
  }
  j["reverseRefs"] = std::move(refs);
  return j;
}

namespace detail {

inline void print_modifiers(std::ostringstream& out,
                            const std::set<std::string>& mods) {
  // Stable Java-conventional order.
  static const char* kOrder[] = {"public",   "protected", "private",
                                 "abstract", "static",    "final",
                                 "sealed",   "non-sealed", "default",
                                 "synchronized", "native", "transient",
                                 "volatile", "strictfp"};
  for (const char* m : kOrder) {
    if (mods.count(m)) out << m << ' ';
  }
}

inline void print_body(std::ostringstream& out,
                       const std::vector<std::string>& tokens,
                       const std::string& indent) {
  out << indent;
  bool line_start = true;
  int paren = 0;
  for (const auto& t : tokens) {
    if (!line_start) out << ' ';
    out << t;
    line_start = false;
    if (t == "(") ++paren;
    if (t == ")") --paren;
    if ((t == ";" && paren == 0) || t == "{" || t == "}") {
      out << '\n' << indent;
      line_start = true;
    }
  }
  out << '\n';
}

inline void print_type(std::ostringstream& out, const TypeDecl& t,
                       const std::string& indent) {
  out << indent;
  print_modifiers(out, t.modifiers);
  out << to_string(t.kind) << ' ' << t.name;
  if (t.superclass) out << " extends " << *t.superclass;
  if (!t.interfaces.empty()) {
    out << (t.kind == TypeKind::Interface ? " extends " : " implements ");
    for (std::size_t i = 0; i < t.interfaces.size(); ++i) {
      out << (i ? ", " : "") << t.interfaces[i];
    }
  }
  out << " {\n";
  const std::string inner = indent + "    ";
  if (t.kind == TypeKind::Enum) out << inner << ";\n";
  for (const auto& f : t.fields) {
    out << inner;
    print_modifiers(out, f.modifiers);
    out << f.typeName << ' ' << f.name << ";\n";
  }
  for (const auto& m : t.methods) {
    out << inner;
    for (const auto& a : m.annotations) out << '@' << a << ' ';
    auto mods = m.modifiers;
    if (t.kind == TypeKind::Interface) mods.erase("public");
    print_modifiers(out, mods);
    if (!m.isConstructor) out << m.returnType.value_or("void") << ' ';
    out << m.name << '(';
    for (std::size_t i = 0; i < m.params.size(); ++i) {
      out << (i ? ", " : "") << m.params[i].typeName << ' '
          << m.params[i].name;
    }
    out << ')';
    if (!m.throwsList.empty()) {
      out << " throws ";
      for (std::size_t i = 0; i < m.throwsList.size(); ++i) {
        out << (i ? ", " : "") << m.throwsList[i];
      }
    }
    if (!m.hasBody) {
      out << ";\n";
      continue;
    }
    out << " {\n";
    print_body(out, m.bodyTokens, inner + "    ");
    out << inner << "}\n";
  }
  for (const auto& n : t.nested) print_type(out, n, inner);
  out << indent << "}\n";
}

}  // namespace detail

/// Renders the modeled subset of a unit back to Java source.
inline std::string print_unit(const SourceUnit& unit) {
  std::ostringstream out;
  if (!unit.package.empty()) out << "package " << unit.package << ";\n\n";
  for (const auto& imp : unit.imports) out << "import " << imp << ";\n";
  if (!unit.imports.empty()) out << '\n';
  for (const auto& t : unit.types) {
    detail::print_type(out, t, "");
    out << '\n';
  }
  return out.str();
}

}  // namespace smellcheck
