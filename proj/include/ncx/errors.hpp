#pragma once

#include <stdexcept>
#include <string>

namespace ncx {

// Error taxonomy shared by the whole library. Every failure that a caller can
// provoke through bad inputs is reported as one of these codes; the CLI maps
// them to exit code 2.
enum class ErrorCode {
  NonAssociative,
  BadUnit,
  NotSquare,
  AlgebraMismatch,
  NotHomogeneous,
  NotDegreeOne,
  TruncationOverflow,
  ModeError,
  DimensionMismatch,
  ParityMismatch,
  NotIdempotent,
  NotHomomorphism,
  NegativeTime,
  NotTopDegree,
  NotIntegrable,
  TargetMismatch,
  PreconditionViolated,
  GridTooCoarse,
  DegreeZeroInput,
  SchemaError,
  ResolutionError,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonAssociative: return "NonAssociative";
    case ErrorCode::BadUnit: return "BadUnit";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::AlgebraMismatch: return "AlgebraMismatch";
    case ErrorCode::NotHomogeneous: return "NotHomogeneous";
    case ErrorCode::NotDegreeOne: return "NotDegreeOne";
    case ErrorCode::TruncationOverflow: return "TruncationOverflow";
    case ErrorCode::ModeError: return "ModeError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ParityMismatch: return "ParityMismatch";
    case ErrorCode::NotIdempotent: return "NotIdempotent";
    case ErrorCode::NotHomomorphism: return "NotHomomorphism";
    case ErrorCode::NegativeTime: return "NegativeTime";
    case ErrorCode::NotTopDegree: return "NotTopDegree";
    case ErrorCode::NotIntegrable: return "NotIntegrable";
    case ErrorCode::TargetMismatch: return "TargetMismatch";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::DegreeZeroInput: return "DegreeZeroInput";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ResolutionError: return "ResolutionError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace ncx
