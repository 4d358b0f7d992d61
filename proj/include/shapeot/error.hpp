#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shapeot {

enum class ErrorCode {
  NegativeWeight,
  ZeroTotalMass,
  DimensionMismatch,
  SolverFailure,
  OracleTooLarge,
  NonUniformWeights,
  NumericalUnderflow,
  TOutOfRange,
  ConfigInvalid,
  DimensionNot2,
  BudgetExceeded,
  DegenerateEndpoints,
  BoundaryIndex,
  BadSwitchFunction,
  LengthMismatch,
  MeasureMismatch,
  BadStep,
  SkewnessViolation,
  NotOrthogonal,
  InvalidCurve,
  ParseError,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type; `code()` identifies
// the contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace shapeot
