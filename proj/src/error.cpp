#include "cmat/error.hpp"

namespace cmat {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::SingularReference: return "SingularReference";
    case ErrorCode::NormInfinite: return "NormInfinite";
    case ErrorCode::ZeroField: return "ZeroField";
    case ErrorCode::ConeExit: return "ConeExit";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::MassMismatch: return "MassMismatch";
    case ErrorCode::ChainViolation: return "ChainViolation";
    case ErrorCode::ScheduleInvalid: return "ScheduleInvalid";
    case ErrorCode::HypothesisFailed: return "HypothesisFailed";
    case ErrorCode::NonMassiveSet: return "NonMassiveSet";
    case ErrorCode::SweepStalled: return "SweepStalled";
    case ErrorCode::EmptyFamily: return "EmptyFamily";
    case ErrorCode::EmptySamples: return "EmptySamples";
    case ErrorCode::NormalizationViolated: return "NormalizationViolated";
    case ErrorCode::IdenticallyZeroSection: return "IdenticallyZeroSection";
    case ErrorCode::NonIntegrable: return "NonIntegrable";
    case ErrorCode::MissingKey: return "MissingKey";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::BadValue: return "BadValue";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::OutputExists: return "OutputExists";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::PowerSumMismatch: return "PowerSumMismatch";
    case ErrorCode::BaseMismatch: return "BaseMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

void require(bool condition, const std::string& message) {
  if (!condition) throw Error(ErrorCode::InvalidArgument, message);
}

}  // namespace cmat
