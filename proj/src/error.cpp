#include "aov/error.hpp"

namespace aov {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOverflowTarget: return "OverflowTarget";
    case ErrorCode::kNegativeTarget: return "NegativeTarget";
    case ErrorCode::kZeroTarget: return "ZeroTarget";
    case ErrorCode::kExhausted: return "Exhausted";
    case ErrorCode::kMalformedHeader: return "MalformedHeader";
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kInconsistentInput: return "InconsistentInput";
    case ErrorCode::kMismatchedInput: return "MismatchedInput";
    case ErrorCode::kIterationOutOfRange: return "IterationOutOfRange";
    case ErrorCode::kIdentityPoint: return "IdentityPoint";
    case ErrorCode::kInvalidPoint: return "InvalidPoint";
    case ErrorCode::kAlreadyInitialized: return "AlreadyInitialized";
    case ErrorCode::kNotInitialized: return "NotInitialized";
    case ErrorCode::kBadSignature: return "BadSignature";
    case ErrorCode::kNotValidAddress: return "NotValidAddress";
    case ErrorCode::kBadProof: return "BadProof";
    case ErrorCode::kUnknownAddress: return "UnknownAddress";
    case ErrorCode::kUnknownHeight: return "UnknownHeight";
    case ErrorCode::kStaleHeight: return "StaleHeight";
    case ErrorCode::kStrideViolation: return "StrideViolation";
    case ErrorCode::kImmatureHeader: return "ImmatureHeader";
    case ErrorCode::kHeightMismatch: return "HeightMismatch";
    case ErrorCode::kMissingDeposit: return "MissingDeposit";
    case ErrorCode::kUnsatisfiable: return "Unsatisfiable";
    case ErrorCode::kEmptySamples: return "EmptySamples";
    case ErrorCode::kScenarioInvalid: return "ScenarioInvalid";
    case ErrorCode::kDivergence: return "DivergenceAt";
    case ErrorCode::kParse: return "ParseError";
  }
  return "Unknown";
}

}  // namespace aov
