#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aov {

enum class ErrorCode {
  // btc_header
  kOverflowTarget,
  kNegativeTarget,
  kZeroTarget,
  kExhausted,
  kMalformedHeader,
  // vdf
  kInvalidParams,
  kInconsistentInput,
  // trigger
  kMismatchedInput,
  // wallet
  kIterationOutOfRange,
  kIdentityPoint,
  kInvalidPoint,
  // contracts
  kAlreadyInitialized,
  kNotInitialized,
  kBadSignature,
  kNotValidAddress,
  kBadProof,
  kUnknownAddress,
  kUnknownHeight,
  kStaleHeight,
  kStrideViolation,
  kImmatureHeader,
  kHeightMismatch,
  kMissingDeposit,
  // booth_privacy
  kUnsatisfiable,
  // sim
  kEmptySamples,
  // scenario / replay
  kScenarioInvalid,
  kDivergence,
  kParse,
};

std::string_view error_name(ErrorCode code);

/// Every recoverable failure in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace aov
