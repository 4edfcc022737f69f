#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace devrisk {

enum class ErrorCode {
  InvalidArgument,
  NegativeInterval,
  TooFewPoints,
  EmptyInput,
  UnknownParser,
  MalformedBlock,
  SchemaError,
  DuplicateCve,
  UnknownCveInNote,
  IoError,
  CorruptWorkspace,
  WindowTooLarge,
  SingularDesign,
  TooShort,
  NonConvergence,
  DegenerateDates,
  LengthMismatch,
  OutOfRange,
  InsufficientData,
  EmptyCorpus,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (notably the CLI) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace devrisk
