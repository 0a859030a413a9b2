#pragma once

#include <stdexcept>
#include <string>

namespace neseek {

// Failure conditions surfaced by the library. The CLI maps these onto exit
// codes: configuration/validation problems -> 2, math preconditions
// (NotHurwitz, SingularSystem, NoConvergence, NonPositiveBeta) -> 3, runtime
// numeric failures (NonFiniteState) -> 4.
enum class Err {
  // graph construction
  SelfLoop,
  DuplicateEdge,
  IndexOutOfRange,
  NonpositiveWeight,
  // linear-algebra preconditions
  NotHurwitz,
  SingularSystem,
  NoConvergence,
  NotAffine,
  // schedule construction and queries
  Unsorted,
  Overlapping,
  EmptyInterval,
  BadRatio,
  BadRange,
  EmptySchedule,
  OutOfHorizon,
  // shared
  DimensionMismatch,
  NonFiniteState,
  NonPositiveBeta,
  NonPositiveValues,
  BadConfig,
};

const char* err_name(Err code);

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& message)
      : std::runtime_error(std::string(err_name(code)) + ": " + message),
        code_(code) {}

  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool ok, Err code, const std::string& message) {
  if (!ok) fail(code, message);
}

}  // namespace neseek
