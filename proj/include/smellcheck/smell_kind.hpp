#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "smellcheck/error.hpp"

namespace smellcheck {

enum class SmellKind {
  DataClass,
  FeatureEnvy,
  GodClass,
  LongParameterList,
  MiddleMan,
  PrimitiveObsession,
  RefusedBequest,
  SpeculativeGenerality,
};

inline constexpr std::array<SmellKind, 8> kAllSmells = {
    SmellKind::DataClass,          SmellKind::FeatureEnvy,
    SmellKind::GodClass,           SmellKind::LongParameterList,
    SmellKind::MiddleMan,          SmellKind::PrimitiveObsession,
    SmellKind::RefusedBequest,     SmellKind::SpeculativeGenerality,
};

// Identifiers used in every file format.
inline std::string_view to_string(SmellKind kind) {
  switch (kind) {
    case SmellKind::DataClass: return "DataClass";
    case SmellKind::FeatureEnvy: return "FeatureEnvy";
    case SmellKind::GodClass: return "GodClass";
    case SmellKind::LongParameterList: return "LongParameterList";
    case SmellKind::MiddleMan: return "MiddleMan";
    case SmellKind::PrimitiveObsession: return "PrimitiveObsession";
    case SmellKind::RefusedBequest: return "RefusedBequest";
    case SmellKind::SpeculativeGenerality: return "SpeculativeGenerality";
  }
  return "";
}

inline std::string_view display_name(SmellKind kind) {
  switch (kind) {
    case SmellKind::DataClass: return "Data Class";
    case SmellKind::FeatureEnvy: return "Feature Envy";
    case SmellKind::GodClass: return "God Class";
    case SmellKind::LongParameterList: return "Long Parameter List";
    case SmellKind::MiddleMan: return "Middle Man";
    case SmellKind::PrimitiveObsession: return "Primitive Obsession";
    case SmellKind::RefusedBequest: return "Refused Bequest";
    case SmellKind::SpeculativeGenerality: return "Speculative Generality";
  }
  return "";
}

inline std::optional<SmellKind> try_parse_smell(std::string_view text) {
  for (auto kind : kAllSmells) {
    if (text == to_string(kind)) return kind;
  }
  return std::nullopt;
}

inline SmellKind parse_smell(std::string_view text) {
  if (auto kind = try_parse_smell(text)) return *kind;
  throw Error(ErrorCode::UnknownSmellKind,
              "unknown smell kind '" + std::string(text) + "'");
}

}  // namespace smellcheck
