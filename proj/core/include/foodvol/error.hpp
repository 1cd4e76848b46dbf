#pragma once

#include <stdexcept>
#include <string>

namespace foodvol {

enum class ErrorCode {
  InvalidArgument,
  IoError,
  ParseError,
  ValidationError,
  InsufficientData,
  DegenerateConfiguration,
  NoConvergence,
  BehindCamera,
  EmptyMask,
  DegenerateMask,
  RectificationFailure,
  NonWatertight,
  EmptyRender,
  MissingDensity,
  EvaluationFailed,
  GenerationFailed,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Process exit codes used by the CLI: 0 success, 2 input/validation,
// 3 geometry degeneracy, 4 render failure, 5 evaluation failure.
int exit_code_for(ErrorCode code);

}  // namespace foodvol
