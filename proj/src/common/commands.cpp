#include "common/commands.hpp"

#include "common/error.hpp"

namespace fusiondrive {

std::string_view to_string(NavCommand c) {
  switch (c) {
    case NavCommand::kStraight: return "straight";
    case NavCommand::kLaneFollow: return "lane_follow";
    case NavCommand::kTurnRight: return "turn_right";
    case NavCommand::kTurnLeft: return "turn_left";
  }
  return "invalid";
}

std::optional<NavCommand> nav_command_from_string(std::string_view s) {
  for (NavCommand c : kAllNavCommands)
    if (to_string(c) == s) return c;
  return std::nullopt;
}

NavCommand nav_command_from_index(int index) {
  if (index < 0 || index >= kNumNavCommands)
    throw Error(ErrorCode::kUnknownCommand,
                "navigation command index out of range: " + std::to_string(index));
  return static_cast<NavCommand>(index);
}

}  // namespace fusiondrive
