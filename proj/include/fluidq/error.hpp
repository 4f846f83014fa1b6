#pragma once

#include <stdexcept>
#include <string>

namespace fluidq {

enum class ErrorCode {
  NegativeOffDiagonal,
  RowSumNonzero,
  Reducible,
  SingularBeyondRankOne,
  StateOutOfDomain,
  EmptyBox,
  UnstableQueue,
  ZeroDriftMode,
  ClampBudgetExceeded,
  TooFewSamples,
  ParseError,
  ValidationError,
  UnknownKey,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

// Exception carrying a machine-checkable code next to the human message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + msg),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace fluidq
