#include "foodvol/error.hpp"

namespace foodvol {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::IoError: return "io-error";
    case ErrorCode::ParseError: return "parse-error";
    case ErrorCode::ValidationError: return "validation-error";
    case ErrorCode::InsufficientData: return "insufficient-data";
    case ErrorCode::DegenerateConfiguration: return "degenerate-configuration";
    case ErrorCode::NoConvergence: return "no-convergence";
    case ErrorCode::BehindCamera: return "behind-camera";
    case ErrorCode::EmptyMask: return "empty-mask";
    case ErrorCode::DegenerateMask: return "degenerate-mask";
    case ErrorCode::RectificationFailure: return "rectification-failure";
    case ErrorCode::NonWatertight: return "non-watertight";
    case ErrorCode::EmptyRender: return "empty-render";
    case ErrorCode::MissingDensity: return "missing-density";
    case ErrorCode::EvaluationFailed: return "evaluation-failed";
    case ErrorCode::GenerationFailed: return "generation-failed";
  }
  return "unknown";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::IoError:
    case ErrorCode::ParseError:
    case ErrorCode::ValidationError:
    case ErrorCode::EmptyMask:
    case ErrorCode::DegenerateMask:
    case ErrorCode::MissingDensity:
    case ErrorCode::GenerationFailed:
      return 2;
    case ErrorCode::InsufficientData:
    case ErrorCode::DegenerateConfiguration:
    case ErrorCode::NoConvergence:
    case ErrorCode::RectificationFailure:
      return 3;
    case ErrorCode::BehindCamera:
    case ErrorCode::EmptyRender:
    case ErrorCode::NonWatertight:
      return 4;
    case ErrorCode::EvaluationFailed:
      return 5;
  }
  return 1;
}

}  // namespace foodvol
