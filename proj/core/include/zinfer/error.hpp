#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zinfer {

// Every failure mode surfaced by the library. The CLI maps these onto its
// exit-code contract (1 = bad input, 2 = model falsified / incompatible).
enum class ErrorCode {
  // table construction
  NegativeEntry,
  NotNormalized,
  AxisMismatch,
  ZViolation,
  // channels
  TooManyIndicators,
  SingularFactor,
  SingularChannel,
  IncompatibleChannel,
  // graphs
  CycleFound,
  BadProxyParents,
  ForbiddenEdgeIntoCounterfactual,
  UnknownNode,
  // bounds / identification
  PositivityViolation,
  FalsifiedModel,
  IncompatibleR0,
  DegenerateInterval,
  NoFeasiblePoint,
  EmptyInterval,
  // estimation / simulation
  EmptyData,
  DegenerateInit,
  InvalidM,
  ShapeMismatch,
  // i/o
  ParseError,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace zinfer
