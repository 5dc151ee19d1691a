#pragma once

#include <stdexcept>
#include <string>

namespace qmetro {

enum class ErrorCode {
  NotSquare,
  NotHermitian,
  ConvergenceFailure,
  DimensionOverflow,
  DimensionMismatch,
  InvalidState,
  BadRank,
  StepTooSmall,
  NonFinite,
  NotNormalized,
  NotADistribution,
  UnsupportedDerivative,
  ZeroProbability,
  FavorableSetEmpty,
  VanishingSuccessProbability,
  CompletionFailure,
  DeltaBelowOne,
  OutOfRange,
  QuadratureOrderTooLow,
  NotUnit,
  DegenerateP,
  Unidentifiable,
  InvalidScenario,
};

/// Single exception type carrying a machine-checkable code plus a human message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

}  // namespace qmetro
