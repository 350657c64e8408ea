#pragma once

#include <stdexcept>
#include <string>

namespace csmap {

/// Error conditions surfaced to callers (and, by name, to the CLI).
enum class ErrorCode {
  DegenerateDirection,
  InvalidPath,
  NoPaths,
  ShapeMismatch,
  EmptyDataset,
  InfeasibleDelay,
  SingularGeometry,
  DegenerateSegment,
  NotApplicable,
  InvalidScenario,
  EmptyMap,
  IoError,
  FormatError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }
  const char* code_name() const { return error_code_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace csmap
