#pragma once

#include <stdexcept>
#include <string>

namespace riddled {

enum class ErrorCode {
  InvalidArgument,   // precondition or config violation
  DomainError,       // argument outside the mathematical domain
  NonFinite,         // integration produced NaN/Inf
  Unbounded,         // trajectory escaped the bounded region
  StepUnderflow,     // adaptive step size fell below h_min
  DegenerateSample,  // a statistic has no resolved data to work with
  InsufficientData,  // a fit has too few usable points
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace riddled
