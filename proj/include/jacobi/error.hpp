#pragma once

#include <stdexcept>
#include <string>

namespace jacobi {

enum class ErrorCode {
  Ok = 0,
  InvalidDimension,
  DimensionMismatch,
  NonFinite,
  NotSymplectic,
  NotTimePreserving,
  PatternViolation,
  NotARotation,
  NotAutonomous,
  MethodMismatch,
  BlowUp,
  OutOfRange,
  TooFewSamples,
  UnknownSystem,
  InvalidParameter,
  ConfigError,
  IoError,
  Internal,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure in the library surfaces as this exception; the C API maps
// `code()` onto its status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Thrown by integrate_flow when the state stops being finite.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, long last_valid_step)
      : Error(ErrorCode::BlowUp, what), last_valid_step_(last_valid_step) {}

  long last_valid_step() const noexcept { return last_valid_step_; }

 private:
  long last_valid_step_;
};

}  // namespace jacobi
