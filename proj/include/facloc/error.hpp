#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace facloc {

enum class ErrorCode {
  ParseError,
  MetricViolation,
  DimensionMismatch,
  InvalidConfig,
  Infeasible,
  Unbounded,
  IterationLimit,
  MissingPenalty,
  MissingCapacity,
  MissingCardinality,
  UnknownFacility,
  UnknownId,
  NotFeasibleFractional,
  TooLarge,
  InvalidSolution,
  ScalePreconditionViolated,
  Overlap,
  InfeasibleInput,
  CardinalityExceeded,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MetricViolation: return "MetricViolation";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::IterationLimit: return "IterationLimit";
    case ErrorCode::MissingPenalty: return "MissingPenalty";
    case ErrorCode::MissingCapacity: return "MissingCapacity";
    case ErrorCode::MissingCardinality: return "MissingCardinality";
    case ErrorCode::UnknownFacility: return "UnknownFacility";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::NotFeasibleFractional: return "NotFeasibleFractional";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::InvalidSolution: return "InvalidSolution";
    case ErrorCode::ScalePreconditionViolated: return "ScalePreconditionViolated";
    case ErrorCode::Overlap: return "Overlap";
    case ErrorCode::InfeasibleInput: return "InfeasibleInput";
    case ErrorCode::CardinalityExceeded: return "CardinalityExceeded";
  }
  return "Unknown";
}

/// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace facloc
