#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace fusiondrive {

/// High-level navigational command. The enumerator value is the policy
/// branch index.
enum class NavCommand : int {
  kStraight = 0,
  kLaneFollow = 1,
  kTurnRight = 2,
  kTurnLeft = 3,
};

inline constexpr int kNumNavCommands = 4;

inline constexpr std::array<NavCommand, kNumNavCommands> kAllNavCommands = {
    NavCommand::kStraight, NavCommand::kLaneFollow, NavCommand::kTurnRight,
    NavCommand::kTurnLeft};

constexpr int branch_index(NavCommand c) { return static_cast<int>(c); }

std::string_view to_string(NavCommand c);
std::optional<NavCommand> nav_command_from_string(std::string_view s);
/// Throws Error(kUnknownCommand) for values outside 0..3.
NavCommand nav_command_from_index(int index);

/// Policy output: steer normalized to [-1, 1] (positive steers right) and
/// speed normalized to [0, 1] (multiply by v_max for m/s).
struct ControlCommand {
  double steer = 0.0;
  double speed = 0.0;

  bool operator==(const ControlCommand&) const = default;
};

}  // namespace fusiondrive
