#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace smellcheck {

enum class ErrorCode {
  DuplicateTypeName,
  InheritanceCycle,
  UnknownType,
  UnknownMethod,
  UnknownSmellKind,
  InvalidCandidate,
  InvalidConfig,
  EntityVanished,
  UnknownCandidate,
  UnknownItem,
  UnknownSession,
  UnknownCode,
  UnknownArgument,
  MissingArguments,
  MixedStanceMerge,
  MixedSmellMerge,
  StanceMismatch,
  SmellMismatch,
  DiscardedArgument,
  RaggedMatrix,
  DisjointCandidateSets,
  InsufficientSessions,
  SchemaViolation,
  SessionConflict,
  Io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateTypeName: return "duplicate_type_name";
    case ErrorCode::InheritanceCycle: return "inheritance_cycle";
    case ErrorCode::UnknownType: return "unknown_type";
    case ErrorCode::UnknownMethod: return "unknown_method";
    case ErrorCode::UnknownSmellKind: return "unknown_smell_kind";
    case ErrorCode::InvalidCandidate: return "invalid_candidate";
    case ErrorCode::InvalidConfig: return "invalid_config";
    case ErrorCode::EntityVanished: return "entity_vanished";
    case ErrorCode::UnknownCandidate: return "unknown_candidate";
    case ErrorCode::UnknownItem: return "unknown_item";
    case ErrorCode::UnknownSession: return "unknown_session";
    case ErrorCode::UnknownCode: return "unknown_code";
    case ErrorCode::UnknownArgument: return "unknown_argument";
    case ErrorCode::MissingArguments: return "missing_arguments";
    case ErrorCode::MixedStanceMerge: return "mixed_stance_merge";
    case ErrorCode::MixedSmellMerge: return "mixed_smell_merge";
    case ErrorCode::StanceMismatch: return "stance_mismatch";
    case ErrorCode::SmellMismatch: return "smell_mismatch";
    case ErrorCode::DiscardedArgument: return "discarded_argument";
    case ErrorCode::RaggedMatrix: return "ragged_matrix";
    case ErrorCode::DisjointCandidateSets: return "disjoint_candidate_sets";
    case ErrorCode::InsufficientSessions: return "insufficient_sessions";
    case ErrorCode::SchemaViolation: return "schema_violation";
    case ErrorCode::SessionConflict: return "session_conflict";
    case ErrorCode::Io: return "io_error";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace smellcheck
