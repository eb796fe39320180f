#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ccc {

/// Domain error kinds. The enumerator names are part of the report format:
/// the CLI surfaces them verbatim.
enum class ErrorCode {
  ForeignEvent,
  ConditionOnNull,
  AtomCountTooLarge,
  NotComplementClosed,
  ZeroProbabilityCondition,
  NotCorrelated,
  InconsistentJoint,
  DegenerateParams,
  OutOfBounds,
  NotAdmissible,
  RequestLimit,
  DimensionMismatch,
  NonCommuting,
  NotPositive,
  CosineOutOfRange,
  CellDimensionTooSmall,
  InvalidSpace,
  ParseError,
};

constexpr std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ForeignEvent: return "ForeignEvent";
    case ErrorCode::ConditionOnNull: return "ConditionOnNull";
    case ErrorCode::AtomCountTooLarge: return "AtomCountTooLarge";
    case ErrorCode::NotComplementClosed: return "NotComplementClosed";
    case ErrorCode::ZeroProbabilityCondition: return "ZeroProbabilityCondition";
    case ErrorCode::NotCorrelated: return "NotCorrelated";
    case ErrorCode::InconsistentJoint: return "InconsistentJoint";
    case ErrorCode::DegenerateParams: return "DegenerateParams";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::NotAdmissible: return "NotAdmissible";
    case ErrorCode::RequestLimit: return "RequestLimit";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonCommuting: return "NonCommuting";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::CosineOutOfRange: return "CosineOutOfRange";
    case ErrorCode::CellDimensionTooSmall: return "CellDimensionTooSmall";
    case ErrorCode::InvalidSpace: return "InvalidSpace";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what),
        code_(code),
        detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace ccc
