#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "smellcheck/error.hpp"
#include "smellcheck/java_lexer.hpp"

namespace smellcheck {

/// Inclusive 1-based line interval.
struct LineRange {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t length() const { return last >= first ? last - first + 1 : 0; }
  bool empty() const { return first == 0 || last < first; }
  bool contains(const LineRange& other) const {
    return other.first >= first && other.last <= last;
  }
  friend bool operator==(const LineRange&, const LineRange&) = default;
};

enum class TypeKind { Class, Interface, Enum };

inline std::string_view to_string(TypeKind kind) {
  switch (kind) {
    case TypeKind::Class: return "class";
    case TypeKind::Interface: return "interface";
    case TypeKind::Enum: return "enum";
  }
  return "class";
}

struct ParseOptions {
  // Treat java.lang.String as a primitive-like type.
  bool string_is_primitive = true;
};

inline bool is_primitive_type(std::string_view raw_type,
                              const ParseOptions& options = {}) {
  static constexpr std::string_view kPrimitives[] = {
      "boolean", "byte", "char", "short", "int", "long", "float", "double"};
  for (auto p : kPrimitives) {
    if (raw_type == p) return true;
  }
  if (options.string_is_primitive &&
      (raw_type == "String" || raw_type == "java.lang.String")) {
    return true;
  }
  return false;
}

struct ParamDecl {
  std::string name;
  std::string typeName;  // raw: generic arguments stripped, array dims kept
  bool isPrimitive = false;
  bool usedInBody = false;

  friend bool operator==(const ParamDecl&, const ParamDecl&) = default;
};

struct FieldDecl {
  std::string name;
  std::string typeName;
  std::set<std::string> modifiers;
  bool isPrimitive = false;
  std::size_t line = 0;
};

/// (receiver identifier, member identifier)
struct QualifiedRef {
  std::string receiver;
  std::string member;

  friend auto operator<=>(const QualifiedRef&, const QualifiedRef&) = default;
};

struct BodyProfile {
  std::multiset<std::string> localCallNames;
  std::multiset<QualifiedRef> qualifiedCalls;
  std::multiset<std::string> ownFieldReads;
  std::multiset<std::string> ownFieldWrites;
  std::multiset<QualifiedRef> foreignAccesses;
  std::size_t statementCount = 0;
  std::size_t lineCount = 0;
  // Set when the body is exactly one qualified call, optionally returned.
  std::optional<QualifiedRef> forwardsTo;
};

struct MethodDecl {
  std::string name;
  std::vector<ParamDecl> params;
  std::optional<std::string> returnType;  // absent for constructors
  std::set<std::string> modifiers;
  std::vector<std::string> annotations;
  std::vector<std::string> throwsList;
  bool isConstructor = false;
  bool isOverride = false;
  bool hasBody = false;
  BodyProfile bodyRefs;
  // Local variable name -> declared raw type, as far as the scanner sees them.
  std::map<std::string, std::string> locals;
  // Body token texts, kept for pretty-printing.
  std::vector<std::string> bodyTokens;
  LineRange span;

  bool is_static() const { return modifiers.count("static") > 0; }
  bool is_public() const { return modifiers.count("public") > 0; }
};

struct TypeDecl {
  std::string name;
  std::string qualifiedName;
  TypeKind kind = TypeKind::Class;
  std::set<std::string> modifiers;
  std::optional<std::string> superclass;
  std::vector<std::string> interfaces;
  std::vector<FieldDecl> fields;
  std::vector<MethodDecl> methods;
  std::vector<TypeDecl> nested;
  LineRange span;

  bool is_abstract() const {
    return kind == TypeKind::Interface || modifiers.count("abstract") > 0;
  }
  bool method_is_abstract(const MethodDecl& m) const {
    return !m.hasBody && !m.modifiers.count("native");
  }
};

struct SourceUnit {
  std::string path;
  std::string package;
  std::vector<std::string> imports;
  std::vector<TypeDecl> types;
  std::vector<ParseDiagnostic> diagnostics;
  std::size_t lineCount = 0;
};

namespace detail {

inline bool is_java_keyword(std::string_view s) {
  static const std::set<std::string_view> kKeywords = {
      "abstract", "assert",     "boolean",   "break",      "byte",
      "case",     "catch",      "char",      "class",      "const",
      "continue", "default",    "do",        "double",     "else",
      "enum",     "extends",    "final",     "finally",    "float",
      "for",      "goto",       "if",        "implements", "import",
      "instanceof", "int",      "interface", "long",       "native",
      "new",      "package",    "private",   "protected",  "public",
      "return",   "short",      "static",    "strictfp",   "super",
      "switch",   "synchronized", "this",    "throw",      "throws",
      "transient", "try",       "void",      "volatile",   "while",
      "true",     "false",      "null",      "yield"};
  return kKeywords.count(s) > 0;
}

inline bool is_modifier(std::string_view s) {
  static const std::set<std::string_view> kModifiers = {
      "public",   "protected", "private",      "static",    "final",
      "abstract", "native",    "synchronized", "transient", "volatile",
      "strictfp", "default",   "sealed"};
  return kModifiers.count(s) > 0;
}

inline bool is_assignment_op(const Token& t) {
  static const std::set<std::string_view> kOps = {
      "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<="};
  return t.kind == TokenKind::Symbol && kOps.count(t.text) > 0;
}

// Raw-name helper: drops generic arguments, keeps array dims.
inline std::string strip_generics(std::string_view type) {
  std::string out;
  int depth = 0;
  for (char c : type) {
    if (c == '<') ++depth;
    else if (c == '>') --depth;
    else if (depth == 0 && c != ' ') out.push_back(c);
  }
  return out;
}

inline std::string element_type(std::string_view raw) {
  auto pos = raw.find('[');
  return std::string(pos == std::string_view::npos ? raw : raw.substr(0, pos));
}

inline std::string simple_name(std::string_view qualified) {
  auto pos = qualified.rfind('.');
  return std::string(pos == std::string_view::npos ? qualified
                                                   : qualified.substr(pos + 1));
}

struct PendingBody {
  std::size_t method_index = 0;
  std::size_t begin = 0;  // first token after '{'
  std::size_t end = 0;    // index of matching '}'
};

class UnitParser {
 public:
  UnitParser(std::vector<Token> tokens, SourceUnit& unit,
             const ParseOptions& options)
      : toks_(std::move(tokens)), unit_(unit), options_(options) {}

  void run() {
    parse_package_and_imports();
    std::set<std::string> seen;
    parse_top_level(seen);
  }

 private:
  std::vector<Token> toks_;
  SourceUnit& unit_;
  const ParseOptions& options_;
  std::size_t pos_ = 0;
  // set by try_parse_type for a top-level type whose body never closed
  bool unterminated_ = false;
  std::size_t body_open_ = 0;

  void add_type(TypeDecl type, std::size_t start, std::set<std::string>& seen) {
    if (!seen.insert(type.qualifiedName).second) {
      diag(toks_[start].line, "duplicate type " + type.qualifiedName);
    } else {
      unit_.types.push_back(std::move(type));
    }
  }

  void parse_top_level(std::set<std::string>& seen) {
    while (!at_end()) {
      std::size_t start = pos_;
      // a header preceded by junk still counts
      if (top_level_only(peek())) {
        if (peek().is_ident("package") && !unit_.package.empty()) {
          diag(peek().line, "second package declaration");
        } else {
          parse_package_and_imports();
          if (pos_ != start) {
            diag(toks_[start].line, "package or import after other text");
            continue;
          }
        }
      }
      unterminated_ = false;
      auto type = try_parse_type(unit_.package, 0);
      if (type && unterminated_) {
        // An unclosed brace ran to the end of the file. Whatever followed
        // it may be well-formed on its own; prefer that over the broken type.
        // A truncated class that still has members is kept, a bare
        // "enum E {" is not.
        const std::size_t before = unit_.types.size();
        pos_ = body_open_ + 1;
        parse_top_level(seen);
        const bool has_members =
            !type->fields.empty() || !type->methods.empty() || !type->nested.empty();
        if (unit_.types.size() == before && has_members) add_type(std::move(*type), start, seen);
        return;
      }
      if (type) {
        add_type(std::move(*type), start, seen);
        continue;
      }
      pos_ = start;
      skip_unrecognized_top_level();
    }
  }

  bool at_end() const { return pos_ >= toks_.size(); }
  const Token& peek(std::size_t ahead = 0) const {
    static const Token kEof{TokenKind::Symbol, "", 0};
    return pos_ + ahead < toks_.size() ? toks_[pos_ + ahead] : kEof;
  }
  std::size_t line_at(std::size_t index) const {
    if (toks_.empty()) return 1;
    return toks_[std::min(index, toks_.size() - 1)].line;
  }
  void diag(std::size_t line, std::string message) {
    unit_.diagnostics.push_back({line, std::move(message)});
  }

  std::optional<std::string> parse_qualified_name() {
    if (!peek().is_ident()) return std::nullopt;
    std::string name = peek().text;
    ++pos_;
    while (peek().is(".") && peek(1).is_ident()) {
      name += "." + peek(1).text;
      pos_ += 2;
    }
    return name;
  }

  void parse_package_and_imports() {
    std::size_t save = pos_;
    skip_annotations(nullptr);
    if (peek().is_ident("package")) {
      std::size_t line = peek().line;
      ++pos_;
      auto name = parse_qualified_name();
      if (name && peek().is(";")) {
        unit_.package = *name;
        ++pos_;
      } else {
        diag(line, "malformed package declaration");
        pos_ = save;
        return;
      }
    } else {
      pos_ = save;
    }
    while (peek().is_ident("import")) {
      std::size_t line = peek().line;
      std::size_t start = pos_;
      ++pos_;
      bool is_static = false;
      if (peek().is_ident("static")) {
        is_static = true;
        ++pos_;
      }
      auto name = parse_qualified_name();
      if (name && peek().is(".") && peek(1).is("*")) {
        *name += ".*";
        pos_ += 2;
      }
      if (!name || !peek().is(";")) {
        diag(line, "malformed import declaration");
        pos_ = start;
        return;
      }
      ++pos_;
      unit_.imports.push_back((is_static ? "static " : "") + *name);
    }
  }

  static bool is_type_keyword(const Token& t) {
    return t.is_ident("class") || t.is_ident("interface") ||
           t.is_ident("enum") || t.is_ident("record");
  }

  // Skips tokens one at a time until something that could start a type
  // declaration; unbalanced braces in garbage must not swallow later types.
  void skip_unrecognized_top_level() {
    std::size_t line = peek().line;
    std::size_t skipped = 0;
    while (!at_end()) {
      ++pos_;
      ++skipped;
      if (at_end()) break;
      const Token& t = peek();
      if (t.is_ident() && (is_modifier(t.text) || is_type_keyword(t)) &&
          !(pos_ > 0 && toks_[pos_ - 1].is("."))) {
        break;
      }
      if (t.is("@") && peek(1).is_ident()) break;
      if (t.is_ident("package") || t.is_ident("import")) break;
      if (t.is(";")) {
        ++pos_;
        ++skipped;
        break;
      }
    }
    diag(line, "skipped unrecognized text (" + std::to_string(skipped) +
                   (skipped == 1 ? " token)" : " tokens)"));
  }

  // Balanced skip starting at an opener; returns index of the closer or
  // toks_.size() if unterminated. pos_ is left after the closer.
  std::size_t skip_balanced(std::string_view open, std::string_view close) {
    int depth = 0;
    while (!at_end()) {
      if (peek().is(open)) ++depth;
      else if (peek().is(close)) {
        --depth;
        if (depth == 0) {
          std::size_t at = pos_;
          ++pos_;
          return at;
        }
      }
      ++pos_;
    }
    return toks_.size();
  }

  // Generic parameter/argument lists. Stops at tokens that cannot appear
  // inside type arguments so a stray '<' does not eat the file.
  bool skip_angle() {
    std::size_t save = pos_;
    int depth = 0;
    while (!at_end()) {
      const Token& t = peek();
      if (t.is("<")) ++depth;
      else if (t.is(">")) {
        --depth;
        if (depth == 0) {
          ++pos_;
          return true;
        }
      } else if (t.is(";") || t.is("{") || t.is("}") || t.is("=") ||
                 t.is("(") || t.is(")")) {
        break;
      }
      ++pos_;
    }
    pos_ = save;
    return false;
  }

  void skip_annotations(std::vector<std::string>* names) {
    while (peek().is("@") && peek(1).is_ident() &&
           !peek(1).is_ident("interface")) {
      ++pos_;
      auto name = parse_qualified_name();
      if (names && name) names->push_back(*name);
      if (peek().is("(")) skip_balanced("(", ")");
    }
  }

  std::set<std::string> parse_modifiers(std::vector<std::string>* annotations) {
    std::set<std::string> mods;
    while (true) {
      if (peek().is("@") && peek(1).is_ident() &&
          !peek(1).is_ident("interface")) {
        skip_annotations(annotations);
        continue;
      }
      if (peek().is_ident() && is_modifier(peek().text) &&
          !(peek().text == "default" && peek(1).is(":"))) {
        mods.insert(peek().text);
        ++pos_;
        continue;
      }
      if (peek().is_ident("non") && peek(1).is("-") &&
          peek(2).is_ident("sealed")) {
        mods.insert("non-sealed");
        pos_ += 3;
        continue;
      }
      break;
    }
    return mods;
  }

  // Parses a type reference; returns its raw name (generics stripped).
  std::optional<std::string> parse_type() {
    std::vector<std::string> ignored;
    skip_annotations(&ignored);
    if (!peek().is_ident()) return std::nullopt;
    if (peek().text != "void" && is_java_keyword(peek().text) &&
        !is_primitive_type(peek().text, ParseOptions{false})) {
      return std::nullopt;
    }
    std::string name = peek().text;
    ++pos_;
    if (peek().is("<") && !skip_angle()) return std::nullopt;
    while (peek().is(".") && peek(1).is_ident()) {
      name += "." + peek(1).text;
      pos_ += 2;
      if (peek().is("<") && !skip_angle()) return std::nullopt;
    }
    while (true) {
      skip_annotations(&ignored);
      if (peek().is("[") && peek(1).is("]")) {
        name += "[]";
        pos_ += 2;
      } else {
        break;
      }
    }
    return name;
  }

  std::optional<std::vector<std::string>> parse_type_list() {
    std::vector<std::string> out;
    while (true) {
      auto t = parse_type();
      if (!t) return std::nullopt;
      out.push_back(*t);
      if (!peek().is(",")) break;
      ++pos_;
    }
    return out;
  }

  std::optional<TypeDecl> try_parse_type(const std::string& prefix, int depth) {
    std::size_t start = pos_;
    std::size_t start_line = peek().line;
    std::vector<std::string> annotations;
    TypeDecl type;
    type.modifiers = parse_modifiers(&annotations);

    std::string keyword;
    if (peek().is("@") && peek(1).is_ident("interface")) {
      keyword = "interface";
      pos_ += 2;
    } else if (is_type_keyword(peek()) && peek(1).is_ident()) {
      keyword = peek().text;
      ++pos_;
    } else {
      pos_ = start;
      return std::nullopt;
    }
    if (!peek().is_ident() || is_java_keyword(peek().text)) {
      diag(peek().line ? peek().line : start_line,
           "type declaration without a name");
      pos_ = start;
      return std::nullopt;
    }
    type.name = peek().text;
    type.qualifiedName = prefix.empty() ? type.name : prefix + "." + type.name;
    type.kind = keyword == "interface" ? TypeKind::Interface
                : keyword == "enum"    ? TypeKind::Enum
                                       : TypeKind::Class;
    ++pos_;
    if (peek().is("<") && !skip_angle()) {
      pos_ = start;
      return std::nullopt;
    }
    std::vector<FieldDecl> record_components;
    if (keyword == "record") {
      if (!peek().is("(")) {
        pos_ = start;
        return std::nullopt;
      }
      ++pos_;
      while (!peek().is(")") && !at_end()) {
        auto t = parse_type();
        if (!t || !peek().is_ident()) {
          pos_ = start;
          return std::nullopt;
        }
        FieldDecl f;
        f.typeName = *t;
        f.name = peek().text;
        f.line = peek().line;
        f.modifiers = {"private", "final"};
        f.isPrimitive = is_primitive_type(f.typeName, options_);
        record_components.push_back(std::move(f));
        ++pos_;
        if (peek().is(",")) ++pos_;
      }
      if (!peek().is(")")) {
        pos_ = start;
        return std::nullopt;
      }
      ++pos_;
    }
    while (true) {
      if (peek().is_ident("extends")) {
        ++pos_;
        auto list = parse_type_list();
        if (!list) {
          pos_ = start;
          return std::nullopt;
        }
        if (type.kind == TypeKind::Interface) {
          type.interfaces.insert(type.interfaces.end(), list->begin(),
                                 list->end());
        } else {
          type.superclass = list->front();
        }
      } else if (peek().is_ident("implements")) {
        ++pos_;
        auto list = parse_type_list();
        if (!list) {
          pos_ = start;
          return std::nullopt;
        }
        type.interfaces.insert(type.interfaces.end(), list->begin(),
                               list->end());
      } else if (peek().is_ident("permits")) {
        ++pos_;
        if (!parse_type_list()) {
          pos_ = start;
          return std::nullopt;
        }
      } else {
        break;
      }
    }
    if (!peek().is("{")) {
      diag(peek().line ? peek().line : start_line,
           "expected '{' after declaration of " + type.name);
      pos_ = start;
      return std::nullopt;
    }
    if (depth == 0) body_open_ = pos_;
    ++pos_;
    type.fields = std::move(record_components);
    std::vector<PendingBody> bodies;
    parse_type_body(type, bodies, depth);
    std::size_t end_line;
    if (peek().is("}")) {
      end_line = peek().line;
      ++pos_;
    } else {
      end_line = line_at(toks_.size() - 1);
      diag(end_line, "unterminated body of " + type.name);
      if (depth == 0) unterminated_ = true;
    }
    type.span = {start_line, end_line};
    for (const auto& pending : bodies) finish_body(type, pending);
    return type;
  }

  // Skips an unrecognized member up to the next ';' or balanced block at
  // member depth, never past the enclosing type's closing brace.
  // package and import never occur inside a type body
  static bool top_level_only(const Token& t) {
    return t.is_ident("package") || t.is_ident("import");
  }

  void recover_member() {
    int depth = 0;
    bool moved = false;
    while (!at_end()) {
      const Token& t = peek();
      if (top_level_only(t)) return;
      if (t.is("{") || t.is("(") || t.is("[")) {
        ++depth;
      } else if (t.is("}") || t.is(")") || t.is("]")) {
        if (depth == 0) {
          if (!moved && !t.is("}")) ++pos_;
          return;
        }
        --depth;
        if (depth == 0 && t.is("}")) {
          ++pos_;
          return;
        }
      } else if (t.is(";") && depth == 0) {
        ++pos_;
        return;
      }
      ++pos_;
      moved = true;
    }
  }

  void parse_enum_constants() {
    while (!at_end()) {
      skip_annotations(nullptr);
      if (peek().is(";")) {
        ++pos_;
        return;
      }
      if (peek().is("}")) return;
      if (!peek().is_ident() || top_level_only(peek())) return;
      // Looks like a member declaration rather than a constant.
      if (peek(1).is_ident() || peek(1).is("<") || peek(1).is(".")) return;
      ++pos_;
      if (peek().is("(")) skip_balanced("(", ")");
      if (peek().is("{")) skip_balanced("{", "}");
      if (peek().is(",")) {
        ++pos_;
        continue;
      }
      if (peek().is(";")) {
        ++pos_;
        return;
      }
      return;
    }
  }

  void parse_type_body(TypeDecl& type, std::vector<PendingBody>& bodies,
                       int depth) {
    if (type.kind == TypeKind::Enum) parse_enum_constants();
    while (!at_end() && !peek().is("}") && !top_level_only(peek())) {
      std::size_t start = pos_;
      std::size_t line = peek().line;
      if (peek().is(";")) {
        ++pos_;
        continue;
      }
      if (!parse_member(type, bodies, depth)) {
        pos_ = start;
        diag(line, "unrecognized member in " + type.name);
        recover_member();
        if (pos_ == start) ++pos_;
      }
    }
  }

  bool parse_member(TypeDecl& type, std::vector<PendingBody>& bodies,
                    int depth) {
    std::size_t start = pos_;
    std::size_t start_line = peek().line;
    std::vector<std::string> annotations;
    auto mods = parse_modifiers(&annotations);

    if (peek().is("{")) {  // initializer block
      skip_balanced("{", "}");
      return true;
    }
    if ((is_type_keyword(peek()) && peek(1).is_ident()) ||
        (peek().is("@") && peek(1).is_ident("interface"))) {
      pos_ = start;
      auto nested = try_parse_type(type.qualifiedName, depth + 1);
      if (!nested) return false;
      type.nested.push_back(std::move(*nested));
      return true;
    }
    if (peek().is("<")) {
      if (!skip_angle()) return false;
    }

    MethodDecl method;
    method.modifiers = mods;
    method.annotations = annotations;
    if (type.kind == TypeKind::Interface && !mods.count("private")) {
      method.modifiers.insert("public");
    }

    if (peek().is_ident(type.name) && peek(1).is("(")) {
      method.isConstructor = true;
      method.name = type.name;
      ++pos_;
    } else if (peek().is_ident(type.name) && peek(1).is("{") &&
               !record_fields_empty(type)) {
      // compact record constructor
      method.isConstructor = true;
      method.name = type.name;
      ++pos_;
      return finish_method(type, std::move(method), bodies, start_line, true);
    } else {
      auto t = parse_type();
      if (!t) return false;
      if (!peek().is_ident() || is_java_keyword(peek().text)) return false;
      if (peek(1).is("(")) {
        method.name = peek().text;
        method.returnType = *t;
        ++pos_;
      } else {
        return parse_fields(type, *t, mods, start);
      }
    }
    if (!parse_params(method)) return false;
    return finish_method(type, std::move(method), bodies, start_line, false);
  }

  static bool record_fields_empty(const TypeDecl& type) {
    return type.fields.empty();
  }

  bool parse_params(MethodDecl& method) {
    if (!peek().is("(")) return false;
    ++pos_;
    std::set<std::string> names;
    while (!peek().is(")")) {
      if (at_end()) return false;
      std::vector<std::string> ignored;
      while (peek().is_ident("final") || peek().is("@")) {
        if (peek().is("@")) skip_annotations(&ignored);
        else ++pos_;
      }
      auto t = parse_type();
      if (!t) return false;
      if (peek().is("...")) {
        *t += "[]";
        ++pos_;
      }
      if (peek().is_ident("this")) {  // receiver parameter
        ++pos_;
      } else {
        if (!peek().is_ident() || is_java_keyword(peek().text)) return false;
        ParamDecl p;
        p.name = peek().text;
        ++pos_;
        while (peek().is("[") && peek(1).is("]")) {
          *t += "[]";
          pos_ += 2;
        }
        p.typeName = *t;
        p.isPrimitive = is_primitive_type(p.typeName, options_);
        if (!names.insert(p.name).second) {
          diag(peek().line, "duplicate parameter name " + p.name);
        } else {
          method.params.push_back(std::move(p));
        }
      }
      if (peek().is(",")) {
        ++pos_;
      } else if (!peek().is(")")) {
        return false;
      }
    }
    ++pos_;
    return true;
  }

  bool finish_method(TypeDecl& type, MethodDecl method,
                     std::vector<PendingBody>& bodies, std::size_t start_line,
                     bool compact) {
    if (!compact) {
      while (peek().is("[") && peek(1).is("]")) {
        if (method.returnType) *method.returnType += "[]";
        pos_ += 2;
      }
      if (peek().is_ident("throws")) {
        ++pos_;
        auto list = parse_type_list();
        if (!list) return false;
        method.throwsList = *list;
      }
      if (peek().is_ident("default")) {  // annotation element default
        while (!at_end() && !peek().is(";")) {
          if (peek().is("{") || peek().is("(")) {
            auto open = peek().text;
            skip_balanced(open, open == "{" ? "}" : ")");
          } else {
            ++pos_;
          }
        }
      }
    }
    method.isOverride = std::find(method.annotations.begin(),
                                  method.annotations.end(),
                                  "Override") != method.annotations.end() ||
                        std::find(method.annotations.begin(),
                                  method.annotations.end(),
                                  "java.lang.Override") !=
                            method.annotations.end();
    if (peek().is(";")) {
      method.span = {start_line, peek().line};
      ++pos_;
      type.methods.push_back(std::move(method));
      return true;
    }
    if (!peek().is("{")) return false;
    std::size_t open = pos_;
    std::size_t close = skip_balanced("{", "}");
    if (close >= toks_.size()) {
      // Body runs off the end of the file; keep what is there.
      close = toks_.size();
      diag(toks_[open].line, "unterminated body of method " + method.name);
      pos_ = toks_.size();
    }
    method.hasBody = true;
    method.span = {start_line, line_at(close)};
    bodies.push_back({type.methods.size(), open + 1, close});
    type.methods.push_back(std::move(method));
    return true;
  }

  bool parse_fields(TypeDecl& type, const std::string& type_name,
                    const std::set<std::string>& mods, std::size_t start) {
    std::vector<FieldDecl> declared;
    while (true) {
      if (!peek().is_ident() || is_java_keyword(peek().text)) {
        pos_ = start;
        return false;
      }
      FieldDecl f;
      f.name = peek().text;
      f.line = peek().line;
      f.typeName = type_name;
      f.modifiers = mods;
      ++pos_;
      while (peek().is("[") && peek(1).is("]")) {
        f.typeName += "[]";
        pos_ += 2;
      }
      f.isPrimitive = is_primitive_type(f.typeName, options_);
      declared.push_back(std::move(f));
      if (peek().is("=")) {
        ++pos_;
        int depth = 0;
        while (!at_end()) {
          const Token& t = peek();
          if (t.is("(") || t.is("[") || t.is("{")) ++depth;
          else if (t.is(")") || t.is("]") || t.is("}")) {
            if (depth == 0) break;
            --depth;
          } else if (depth == 0 && (t.is(",") || t.is(";"))) {
            break;
          }
          ++pos_;
        }
      }
      if (peek().is(",")) {
        ++pos_;
        continue;
      }
      if (peek().is(";")) {
        ++pos_;
        break;
      }
      pos_ = start;
      return false;
    }
    for (auto& f : declared) type.fields.push_back(std::move(f));
    return true;
  }

  void finish_body(TypeDecl& type, const PendingBody& pending);
};

// Extracts the reference profile of a method body by pattern scanning.
inline void scan_body(const std::vector<Token>& toks, std::size_t begin,
                      std::size_t end, const std::set<std::string>& own_fields,
                      MethodDecl& method) {
  BodyProfile& profile = method.bodyRefs;
  std::set<std::string> params;
  for (const auto& p : method.params) params.insert(p.name);
  auto& locals = method.locals;

  auto shadowed = [&](const std::string& name) {
    return params.count(name) > 0 || locals.count(name) > 0;
  };
  auto is_write = [&](std::size_t k) {
    if (k + 1 < end && (is_assignment_op(toks[k + 1]) ||
                        toks[k + 1].is("++") || toks[k + 1].is("--"))) {
      return true;
    }
    return k > begin && (toks[k - 1].is("++") || toks[k - 1].is("--"));
  };
  auto record_own = [&](const std::string& name, std::size_t k) {
    if (is_write(k)) profile.ownFieldWrites.insert(name);
    else profile.ownFieldReads.insert(name);
  };
  // Type name that ends right before token index k (for local declarations).
  auto type_before = [&](std::size_t k) -> std::optional<std::string> {
    if (k == begin) return std::nullopt;
    std::size_t j = k - 1;
    std::string dims;
    while (j > begin && toks[j].is("]") && toks[j - 1].is("[")) {
      dims += "[]";
      if (j < begin + 2) return std::nullopt;
      j -= 2;
    }
    if (toks[j].is(">")) {
      int depth = 0;
      while (true) {
        if (toks[j].is(">")) ++depth;
        else if (toks[j].is("<")) {
          --depth;
          if (depth == 0) break;
        } else if (toks[j].is(";") || toks[j].is("{") || toks[j].is("}") ||
                   toks[j].is("(")) {
          return std::nullopt;
        }
        if (j == begin) return std::nullopt;
        --j;
      }
      if (j == begin) return std::nullopt;
      --j;
    }
    if (!toks[j].is_ident()) return std::nullopt;
    const auto& t = toks[j].text;
    if (is_java_keyword(t) && !is_primitive_type(t, ParseOptions{false})) {
      return std::nullopt;
    }
    if (j > begin && toks[j - 1].is(".")) return std::nullopt;
    return t + dims;
  };

  int paren_depth = 0;
  for (std::size_t k = begin; k < end; ++k) {
    const Token& t = toks[k];
    const bool after_dot = k > begin && toks[k - 1].is(".");
    if (t.is("(")) {
      ++paren_depth;
      continue;
    }
    if (t.is(")")) {
      if (paren_depth > 0) --paren_depth;
      continue;
    }
    if (t.is(";")) {
      if (paren_depth == 0) ++profile.statementCount;
      continue;
    }
    if (!t.is_ident()) continue;

    if (t.text == "if" || t.text == "for" || t.text == "while" ||
        t.text == "switch" || t.text == "try") {
      ++profile.statementCount;
      continue;
    }
    if (t.text == "new" && !after_dot) {
      // Skip the instantiated type name so it is not taken for a call;
      // anonymous class bodies are opaque.
      std::size_t j = k + 1;
      while (j < end && (toks[j].is_ident() || toks[j].is("."))) ++j;
      if (j < end && toks[j].is("<")) {
        int depth = 0;
        while (j < end) {
          if (toks[j].is("<")) ++depth;
          else if (toks[j].is(">") && --depth == 0) {
            ++j;
            break;
          }
          ++j;
        }
      }
      if (j < end && toks[j].is("(")) {
        int depth = 0;
        std::size_t close = j;
        while (close < end) {
          if (toks[close].is("(")) ++depth;
          else if (toks[close].is(")") && --depth == 0) break;
          ++close;
        }
        if (close + 1 < end && toks[close + 1].is("{")) {
          // Scan the constructor arguments, then jump over the class body.
          scan_body(toks, j + 1, close, own_fields, method);
          std::size_t b = close + 1;
          int bd = 0;
          while (b < end) {
            if (toks[b].is("{")) ++bd;
            else if (toks[b].is("}") && --bd == 0) break;
            ++b;
          }
          k = b;
          continue;
        }
      }
      k = j - 1;
      continue;
    }
    if ((t.text == "this" || t.text == "super") && !after_dot) {
      if (k + 2 < end && toks[k + 1].is(".") && toks[k + 2].is_ident()) {
        const std::string& member = toks[k + 2].text;
        if (k + 3 < end && toks[k + 3].is("(")) {
          profile.localCallNames.insert(member);
        } else if (k + 4 < end && toks[k + 3].is(".") &&
                   toks[k + 4].is_ident()) {
          profile.ownFieldReads.insert(member);
          if (k + 5 < end && toks[k + 5].is("(")) {
            profile.qualifiedCalls.insert({member, toks[k + 4].text});
          } else {
            profile.foreignAccesses.insert({member, toks[k + 4].text});
          }
          k += 4;
          continue;
        } else {
          record_own(member, k + 2);
        }
        k += 2;
      }
      continue;
    }
    if (after_dot || is_java_keyword(t.text)) continue;

    // Local variable declaration: <type> name (= | ; | , | : | ))
    if (k + 1 < end &&
        (toks[k + 1].is("=") || toks[k + 1].is(";") || toks[k + 1].is(",") ||
         toks[k + 1].is(":") || toks[k + 1].is(")"))) {
      if (auto declared = type_before(k)) {
        locals[t.text] = *declared;
        continue;
      }
    }
    if (k + 1 < end && toks[k + 1].is("(")) {
      profile.localCallNames.insert(t.text);
      continue;
    }
    if (k + 2 < end && toks[k + 1].is(".") && toks[k + 2].is_ident()) {
      const std::string& member = toks[k + 2].text;
      if (own_fields.count(t.text) && !shadowed(t.text)) {
        profile.ownFieldReads.insert(t.text);
      }
      if (k + 3 < end && toks[k + 3].is("(")) {
        profile.qualifiedCalls.insert({t.text, member});
      } else {
        profile.foreignAccesses.insert({t.text, member});
      }
      k += 2;
      continue;
    }
    if (own_fields.count(t.text) && !shadowed(t.text)) {
      record_own(t.text, k);
    }
  }
}

inline void UnitParser::finish_body(TypeDecl& type, const PendingBody& pending) {
  MethodDecl& method = type.methods[pending.method_index];
  std::set<std::string> own_fields;
  for (const auto& f : type.fields) own_fields.insert(f.name);

  scan_body(toks_, pending.begin, pending.end, own_fields, method);

  for (std::size_t k = pending.begin; k < pending.end; ++k) {
    const Token& t = toks_[k];
    method.bodyTokens.push_back(t.text);
    if (!t.is_ident() || (k > pending.begin && toks_[k - 1].is("."))) continue;
    for (auto& p : method.params) {
      if (p.name == t.text) p.usedInBody = true;
    }
  }

  BodyProfile& profile = method.bodyRefs;
  std::size_t open_line = line_at(pending.begin - 1);
  std::size_t close_line = line_at(pending.end);
  profile.lineCount = close_line >= open_line ? close_line - open_line + 1 : 0;

  // Forwarding shape: [return] [this .] recv . member ( args ) ;
  std::size_t k = pending.begin;
  const std::size_t end = pending.end;
  if (k < end && toks_[k].is_ident("return")) ++k;
  if (k + 1 < end && toks_[k].is_ident("this") && toks_[k + 1].is(".")) k += 2;
  if (k + 3 < end && toks_[k].is_ident() && !is_java_keyword(toks_[k].text) &&
      toks_[k + 1].is(".") && toks_[k + 2].is_ident() && toks_[k + 3].is("(")) {
    QualifiedRef target{toks_[k].text, toks_[k + 2].text};
    std::size_t j = k + 3;
    int depth = 0;
    for (; j < end; ++j) {
      if (toks_[j].is("(")) ++depth;
      else if (toks_[j].is(")") && --depth == 0) break;
    }
    if (j + 2 == end && toks_[j + 1].is(";") &&
        profile.qualifiedCalls.size() == 1 && profile.localCallNames.empty()) {
      profile.forwardsTo = target;
    }
  }
}

}  // namespace detail

/// Tolerant structural parse of one Java compilation unit.
inline SourceUnit parse_unit(std::string_view text, const std::string& path,
                             const ParseOptions& options = {}) {
  SourceUnit unit;
  unit.path = path;
  LexResult lexed = lex_java(text);
  unit.lineCount = lexed.line_count;
  unit.diagnostics = std::move(lexed.diagnostics);
  if (lexed.tokens.empty()) {
    unit.diagnostics.push_back({1, "empty unit"});
    return unit;
  }
  detail::UnitParser parser(std::move(lexed.tokens), unit, options);
  parser.run();
  if (unit.types.empty() &&
      std::none_of(unit.diagnostics.begin(), unit.diagnostics.end(),
                   [](const ParseDiagnostic& d) {
                     return d.message.rfind("skipped", 0) == 0;
                   })) {
    unit.diagnostics.push_back({1, "no type declarations"});
  }
  std::stable_sort(unit.diagnostics.begin(), unit.diagnostics.end(),
                   [](const ParseDiagnostic& a, const ParseDiagnostic& b) {
                     return a.line < b.line;
                   });
  return unit;
}

// ---------------------------------------------------------------------------
// Project model

enum class EdgeKind { Extends, Implements };

struct InheritanceEdge {
  std::string child;
  std::string parent;  // resolved qualified name, or the written name if external
  EdgeKind kind = EdgeKind::Extends;
  bool external = false;

  friend bool operator==(const InheritanceEdge&, const InheritanceEdge&) = default;
};

/// One place that refers to a member. viaType is the project type through
/// which the member was reached (the caller's own type for unqualified
/// access, the receiver's declared type otherwise); empty when the receiver
/// could not be typed and the link was made by name alone.
struct ReferenceSite {
  std::string method;
  std::string viaType;

  friend auto operator<=>(const ReferenceSite&, const ReferenceSite&) = default;
};

struct TypeLocation {
  std::size_t unit = 0;
  std::vector<std::size_t> path;  // indices through TypeDecl::nested
};

struct MethodLocation {
  std::string type;
  std::size_t index = 0;
};

class ProjectModel {
 public:
  std::vector<SourceUnit> units;
  std::map<std::string, TypeLocation> typeIndex;
  std::map<std::string, MethodLocation> methodIndex;
  std::vector<InheritanceEdge> inheritanceEdges;
  // "pkg.Type#member" -> sites referencing it (name-based approximation)
  std::map<std::string, std::set<ReferenceSite>> reverseRefs;
  // type -> project types whose declarations mention it
  std::map<std::string, std::set<std::string>> typeUses;

  bool has_type(const std::string& qn) const { return typeIndex.count(qn) > 0; }

  const TypeDecl& type(const std::string& qn) const {
    auto it = typeIndex.find(qn);
    if (it == typeIndex.end()) {
      throw Error(ErrorCode::UnknownType, "unknown type " + qn);
    }
    const TypeDecl* t = &units[it->second.unit].types[it->second.path.front()];
    for (std::size_t i = 1; i < it->second.path.size(); ++i) {
      t = &t->nested[it->second.path[i]];
    }
    return *t;
  }

  const SourceUnit& unit_of(const std::string& type_qn) const {
    auto it = typeIndex.find(type_qn);
    if (it == typeIndex.end()) {
      throw Error(ErrorCode::UnknownType, "unknown type " + type_qn);
    }
    return units[it->second.unit];
  }

  const MethodDecl& method(const std::string& method_id) const {
    auto it = methodIndex.find(method_id);
    if (it == methodIndex.end()) {
      throw Error(ErrorCode::UnknownMethod, "unknown method " + method_id);
    }
    return type(it->second.type).methods[it->second.index];
  }

  const std::string& owner_of(const std::string& method_id) const {
    auto it = methodIndex.find(method_id);
    if (it == methodIndex.end()) {
      throw Error(ErrorCode::UnknownMethod, "unknown method " + method_id);
    }
    return it->second.type;
  }

  std::optional<std::string> local_superclass(const std::string& qn) const {
    for (const auto& e : inheritanceEdges) {
      if (e.child == qn && e.kind == EdgeKind::Extends && !e.external) {
        return e.parent;
      }
    }
    return std::nullopt;
  }

  std::vector<std::string> local_parents(const std::string& qn) const {
    std::vector<std::string> out;
    for (const auto& e : inheritanceEdges) {
      if (e.child == qn && !e.external) out.push_back(e.parent);
    }
    return out;
  }

  /// Project-local ancestors, nearest first (superclass chain, then interfaces).
  std::vector<std::string> local_ancestors(const std::string& qn) const {
    std::vector<std::string> out;
    std::set<std::string> seen{qn};
    std::vector<std::string> frontier{qn};
    while (!frontier.empty()) {
      std::vector<std::string> next;
      for (const auto& t : frontier) {
        for (const auto& p : local_parents(t)) {
          if (seen.insert(p).second) {
            out.push_back(p);
            next.push_back(p);
          }
        }
      }
      frontier = std::move(next);
    }
    return out;
  }

  std::vector<std::string> local_subtypes(const std::string& qn) const {
    std::vector<std::string> out;
    for (const auto& e : inheritanceEdges) {
      if (e.parent == qn && !e.external) out.push_back(e.child);
    }
    return out;
  }

  std::vector<std::string> methods_of(const std::string& type_qn) const {
    std::vector<std::string> out;
    for (const auto& [id, loc] : methodIndex) {
      if (loc.type == type_qn) out.push_back(id);
    }
    std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
      return methodIndex.at(a).index < methodIndex.at(b).index;
    });
    return out;
  }

  std::string method_id(const std::string& type_qn, std::size_t index) const {
    for (const auto& [id, loc] : methodIndex) {
      if (loc.type == type_qn && loc.index == index) return id;
    }
    throw Error(ErrorCode::UnknownMethod,
                "no method #" + std::to_string(index) + " in " + type_qn);
  }

  const std::set<ReferenceSite>& refs_to(const std::string& member_key) const {
    static const std::set<ReferenceSite> kEmpty;
    auto it = reverseRefs.find(member_key);
    return it == reverseRefs.end() ? kEmpty : it->second;
  }
};

inline std::string method_signature(const std::string& type_qn,
                                    const MethodDecl& m) {
  std::string out = type_qn + "#" + m.name + "(";
  for (std::size_t i = 0; i < m.params.size(); ++i) {
    if (i) out += ",";
    out += m.params[i].typeName;
  }
  return out + ")";
}

inline std::string member_key(const std::string& type_qn,
                              const std::string& member) {
  return type_qn + "#" + member;
}

namespace detail {

inline void for_each_type(
    const TypeDecl& t, std::vector<std::size_t>& path,
    const std::function<void(const TypeDecl&, const std::vector<std::size_t>&)>&
        fn) {
  fn(t, path);
  for (std::size_t i = 0; i < t.nested.size(); ++i) {
    path.push_back(i);
    for_each_type(t.nested[i], path, fn);
    path.pop_back();
  }
}

class Resolver {
 public:
  explicit Resolver(const ProjectModel& model) : model_(model) {}

  // Resolves a written type name as seen from inside `context`.
  std::optional<std::string> resolve(const std::string& written,
                                     const std::string& context) const {
    std::string name = element_type(strip_generics(written));
    if (name.empty()) return std::nullopt;
    const SourceUnit& unit = model_.unit_of(context);
    auto head_end = name.find('.');
    std::string head = name.substr(0, head_end);
    std::string rest =
        head_end == std::string::npos ? "" : name.substr(head_end);

    if (head_end != std::string::npos && model_.has_type(name)) return name;

    // enclosing scopes, innermost first
    std::string scope = context;
    while (true) {
      std::string candidate = scope + "." + head + rest;
      if (model_.has_type(candidate)) return candidate;
      if (simple_name(scope) == head && rest.empty() &&
          model_.has_type(scope)) {
        return scope;
      }
      auto dot = scope.rfind('.');
      if (dot == std::string::npos) break;
      std::string outer = scope.substr(0, dot);
      if (!model_.has_type(outer)) break;
      scope = outer;
    }
    for (const auto& imp : unit.imports) {
      if (imp.rfind("static ", 0) == 0) continue;
      if (imp.size() > head.size() + 1 &&
          imp.compare(imp.size() - head.size() - 1, std::string::npos,
                      "." + head) == 0) {
        std::string candidate = imp + rest;
        if (model_.has_type(candidate)) return candidate;
        return std::nullopt;  // explicitly imported external type
      }
    }
    std::string same_pkg =
        (unit.package.empty() ? "" : unit.package + ".") + head + rest;
    if (model_.has_type(same_pkg)) return same_pkg;
    for (const auto& imp : unit.imports) {
      if (imp.size() > 2 && imp.compare(imp.size() - 2, 2, ".*") == 0 &&
          imp.rfind("static ", 0) != 0) {
        std::string candidate = imp.substr(0, imp.size() - 1) + head + rest;
        if (model_.has_type(candidate)) return candidate;
      }
    }
    return std::nullopt;
  }

 private:
  const ProjectModel& model_;
};

}  // namespace detail

/// Joins parsed units into one cross-linked model.
inline ProjectModel resolve_project(std::vector<SourceUnit> units) {
  ProjectModel model;
  model.units = std::move(units);

  for (std::size_t u = 0; u < model.units.size(); ++u) {
    for (std::size_t i = 0; i < model.units[u].types.size(); ++i) {
      std::vector<std::size_t> path{i};
      detail::for_each_type(
          model.units[u].types[i], path,
          [&](const TypeDecl& t, const std::vector<std::size_t>& p) {
            if (!model.typeIndex.emplace(t.qualifiedName, TypeLocation{u, p})
                     .second) {
              throw Error(ErrorCode::DuplicateTypeName,
                          "type " + t.qualifiedName + " is declared in both " +
                              model.unit_of(t.qualifiedName).path + " and " +
                              model.units[u].path);
            }
          });
    }
  }

  detail::Resolver resolver(model);
  for (const auto& [qn, loc] : model.typeIndex) {
    const TypeDecl& t = model.type(qn);
    auto add_edge = [&](const std::string& written, EdgeKind kind) {
      auto target = resolver.resolve(written, qn);
      model.inheritanceEdges.push_back(
          {qn, target ? *target : detail::strip_generics(written), kind,
           !target.has_value()});
    };
    if (t.superclass) add_edge(*t.superclass, EdgeKind::Extends);
    for (const auto& i : t.interfaces) add_edge(i, EdgeKind::Implements);
  }

  // Cycle check over project-local edges.
  {
    std::map<std::string, int> state;  // 0 new, 1 on stack, 2 done
    std::function<void(const std::string&)> visit = [&](const std::string& n) {
      state[n] = 1;
      for (const auto& p : model.local_parents(n)) {
        if (state[p] == 1) {
          throw Error(ErrorCode::InheritanceCycle,
                      "inheritance cycle through " + n + " and " + p);
        }
        if (state[p] == 0) visit(p);
      }
      state[n] = 2;
    };
    for (const auto& [qn, loc] : model.typeIndex) {
      if (state[qn] == 0) visit(qn);
    }
  }

  // Method ids.
  for (const auto& [qn, loc] : model.typeIndex) {
    const TypeDecl& t = model.type(qn);
    for (std::size_t i = 0; i < t.methods.size(); ++i) {
      std::string id = method_signature(qn, t.methods[i]);
      std::string unique = id;
      for (int n = 2; model.methodIndex.count(unique); ++n) {
        unique = id + "~" + std::to_string(n);
      }
      model.methodIndex.emplace(unique, MethodLocation{qn, i});
    }
  }

  // Signature-based override marking against project-local ancestors.
  for (const auto& [qn, loc] : model.typeIndex) {
    auto ancestors = model.local_ancestors(qn);
    if (ancestors.empty()) continue;
    auto& unit = model.units[loc.unit];
    TypeDecl* t = &unit.types[loc.path.front()];
    for (std::size_t i = 1; i < loc.path.size(); ++i) t = &t->nested[loc.path[i]];
    for (auto& m : t->methods) {
      if (m.isOverride || m.isConstructor || m.is_static()) continue;
      for (const auto& a : ancestors) {
        const TypeDecl& at = model.type(a);
        bool found = std::any_of(
            at.methods.begin(), at.methods.end(), [&](const MethodDecl& am) {
              if (am.isConstructor || am.is_static() || am.name != m.name ||
                  am.params.size() != m.params.size() ||
                  am.modifiers.count("private")) {
                return false;
              }
              for (std::size_t p = 0; p < m.params.size(); ++p) {
                if (detail::simple_name(am.params[p].typeName) !=
                    detail::simple_name(m.params[p].typeName)) {
                  return false;
                }
              }
              return true;
            });
        if (found) {
          m.isOverride = true;
          break;
        }
      }
    }
  }

  // Member lookup through a type and its local ancestors.
  auto find_member = [&](const std::string& type_qn, const std::string& name,
                         bool want_method) -> std::optional<std::string> {
    std::vector<std::string> chain{type_qn};
    auto anc = model.local_ancestors(type_qn);
    chain.insert(chain.end(), anc.begin(), anc.end());
    for (const auto& c : chain) {
      const TypeDecl& ct = model.type(c);
      if (want_method) {
        for (const auto& m : ct.methods) {
          if (!m.isConstructor && m.name == name) return c;
        }
      } else {
        for (const auto& f : ct.fields) {
          if (f.name == name) return c;
        }
      }
    }
    return std::nullopt;
  };

  auto note_use = [&](const std::string& written, const std::string& context) {
    if (auto target = resolver.resolve(written, context)) {
      if (*target != context) model.typeUses[*target].insert(context);
    }
  };

  for (const auto& [id, mloc] : model.methodIndex) {
    const std::string& owner = mloc.type;
    const TypeDecl& t = model.type(owner);
    const MethodDecl& m = t.methods[mloc.index];
    const BodyProfile& body = m.bodyRefs;

    auto link = [&](const std::string& declaring, const std::string& member,
                    const std::string& via) {
      model.reverseRefs[member_key(declaring, member)].insert({id, via});
    };
    auto link_local = [&](const std::string& name, bool want_method) {
      // own type first, then enclosing types for nested classes
      std::string scope = owner;
      while (true) {
        if (auto d = find_member(scope, name, want_method)) {
          link(*d, name, scope);
          return;
        }
        auto dot = scope.rfind('.');
        if (dot == std::string::npos) return;
        scope = scope.substr(0, dot);
        if (!model.has_type(scope)) return;
      }
    };
    for (const auto& n : body.localCallNames) link_local(n, true);
    for (const auto& f : body.ownFieldReads) link_local(f, false);
    for (const auto& f : body.ownFieldWrites) link_local(f, false);

    // Declared type of a receiver identifier, if it is a variable.
    auto receiver_type = [&](const std::string& recv) -> std::optional<std::string> {
      for (const auto& p : m.params) {
        if (p.name == recv) return p.typeName;
      }
      if (auto it = m.locals.find(recv); it != m.locals.end()) return it->second;
      std::vector<std::string> chain{owner};
      auto anc = model.local_ancestors(owner);
      chain.insert(chain.end(), anc.begin(), anc.end());
      for (const auto& c : chain) {
        for (const auto& f : model.type(c).fields) {
          if (f.name == recv) return f.typeName;
        }
      }
      return std::nullopt;
    };
    auto link_qualified = [&](const QualifiedRef& ref, bool want_method) {
      std::optional<std::string> target;
      auto declared = receiver_type(ref.receiver);
      if (declared) {
        if (declared->find('[') != std::string::npos) return;
        target = resolver.resolve(*declared, owner);
        if (!target) return;  // external receiver type
      } else {
        target = resolver.resolve(ref.receiver, owner);  // static access
      }
      if (target) {
        if (auto d = find_member(*target, ref.member, want_method)) {
          link(*d, ref.member, *target);
        }
        return;
      }
      // Capitalized receivers are taken for external type names.
      if (!declared && !ref.receiver.empty() &&
          std::isupper(static_cast<unsigned char>(ref.receiver.front()))) {
        return;
      }
      // Untyped receiver: link by member name alone.
      for (const auto& [qn, loc] : model.typeIndex) {
        if (find_member(qn, ref.member, want_method) == qn) {
          link(qn, ref.member, "");
        }
      }
    };
    for (const auto& q : body.qualifiedCalls) link_qualified(q, true);
    for (const auto& q : body.foreignAccesses) link_qualified(q, false);

    for (const auto& p : m.params) note_use(p.typeName, owner);
    if (m.returnType) note_use(*m.returnType, owner);
    for (const auto& [name, type] : m.locals) note_use(type, owner);
  }
  for (const auto& [qn, loc] : model.typeIndex) {
    const TypeDecl& t = model.type(qn);
    for (const auto& f : t.fields) note_use(f.typeName, qn);
    if (t.superclass) note_use(*t.superclass, qn);
    for (const auto& i : t.interfaces) note_use(i, qn);
  }
  return model;
}

}  // namespace smellcheck
