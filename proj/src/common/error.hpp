#pragma once

#include <stdexcept>
#include <string>

namespace fusiondrive {

// Numeric values are mirrored by fd_status in the public C header.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kShapeMismatch = 2,
  kPlacementInfeasible = 3,
  kUnreachableGoal = 4,
  kOffRoute = 5,
  kEmptyInput = 6,
  kUnknownCommand = 7,
  kUnknownVariant = 8,
  kDivergence = 9,
  kIo = 10,
  kConfig = 11,
  kMissingArtifact = 12,
  kNoSuccessfulEpisodes = 13,
  kInternal = 14,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fusiondrive
