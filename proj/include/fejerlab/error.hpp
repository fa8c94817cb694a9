#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fejerlab {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  UnsupportedSet,
  NotViolating,
  ZeroSubgradient,
  NegativeEpsilon,
  EmptySample,
  EmptyProblem,
  InvalidN,
  DegenerateClusterPair,
  LengthMismatch,
  NotSerializable,
  Parse,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnsupportedSet: return "UnsupportedSet";
    case ErrorCode::NotViolating: return "NotViolating";
    case ErrorCode::ZeroSubgradient: return "ZeroSubgradient";
    case ErrorCode::NegativeEpsilon: return "NegativeEpsilon";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::EmptyProblem: return "EmptyProblem";
    case ErrorCode::InvalidN: return "InvalidN";
    case ErrorCode::DegenerateClusterPair: return "DegenerateClusterPair";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NotSerializable: return "NotSerializable";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fejerlab
