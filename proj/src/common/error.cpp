#include "common/error.hpp"

namespace fusiondrive {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kShapeMismatch: return "shape-mismatch";
    case ErrorCode::kPlacementInfeasible: return "placement-infeasible";
    case ErrorCode::kUnreachableGoal: return "unreachable-goal";
    case ErrorCode::kOffRoute: return "off-route";
    case ErrorCode::kEmptyInput: return "empty-input";
    case ErrorCode::kUnknownCommand: return "unknown-command";
    case ErrorCode::kUnknownVariant: return "unknown-variant";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kMissingArtifact: return "missing-artifact";
    case ErrorCode::kNoSuccessfulEpisodes: return "no-successful-episodes";
    case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

}  // namespace fusiondrive
