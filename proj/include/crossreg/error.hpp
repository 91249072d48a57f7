#pragma once

#include <stdexcept>
#include <string>

namespace crossreg {

enum class ErrorCode {
  OnLocus,
  BadAxis,
  DuplicateAxis,
  EmptyLocus,
  OnDivisor,
  UnsupportedMollifier,
  UnsupportedChart,
  QuadratureFailure,
  StepFailure,
  Escape,
  NoCrossing,
  Tangency,
  SlidingDetected,
  DegenerateAngle,
  SingularChange,
  NoConvergence,
  NotSmooth,
  DegenerateParameters,
  InvalidArgument,
  ParseError,
  IOFailure,
};

const char* to_string(ErrorCode code);

/// Single exception type for the library; the code identifies the failure mode.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace crossreg
