#include "jacobi/error.hpp"

namespace jacobi {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotSymplectic: return "NotSymplectic";
    case ErrorCode::NotTimePreserving: return "NotTimePreserving";
    case ErrorCode::PatternViolation: return "PatternViolation";
    case ErrorCode::NotARotation: return "NotARotation";
    case ErrorCode::NotAutonomous: return "NotAutonomous";
    case ErrorCode::MethodMismatch: return "MethodMismatch";
    case ErrorCode::BlowUp: return "BlowUp";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::UnknownSystem: return "UnknownSystem";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace jacobi
