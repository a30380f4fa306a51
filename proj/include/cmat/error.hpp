#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cmat {

enum class ErrorCode {
  GridMismatch,
  NonFinite,
  SingularReference,
  NormInfinite,
  ZeroField,
  ConeExit,
  NoConvergence,
  MassMismatch,
  ChainViolation,
  ScheduleInvalid,
  HypothesisFailed,
  NonMassiveSet,
  SweepStalled,
  EmptyFamily,
  EmptySamples,
  NormalizationViolated,
  IdenticallyZeroSection,
  NonIntegrable,
  MissingKey,
  UnknownKey,
  BadValue,
  IoError,
  OutputExists,
  ArityMismatch,
  PowerSumMismatch,
  BaseMismatch,
  InvalidArgument,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Throws InvalidArgument with the message when the condition does not hold.
void require(bool condition, const std::string& message);

}  // namespace cmat
