#pragma once

#include <stdexcept>
#include <string>

namespace conesheaf {

// Failure codes surfaced through Error and echoed in CLI reports.
enum class Errc {
  CompositionMismatch,
  SearchBudgetExceeded,
  Arity,
  NotEffectiveMonic,
  NotNormal,
  DomainGap,
  Noncommuting,
  SpaceMismatch,
  NotCompatible,
  NotSeparating,
  NotALift,
  NotUnitary,
  PreconditionFailed,
  GeneratorRelationsFail,
  NotCommuting,
  InvalidInput,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace conesheaf
