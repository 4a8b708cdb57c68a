#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "common/commands.hpp"
#include "control/pid.hpp"
#include "evalbench/agent.hpp"
#include "simworld/renderer.hpp"
#include "simworld/route.hpp"
#include "simworld/world.hpp"

namespace fusiondrive::bench {

enum class BenchmarkStyle { kCorl2017, kNoCrash };
std::string_view to_string(BenchmarkStyle s);
BenchmarkStyle benchmark_style_from_string(std::string_view s);

struct EpisodeRules {
  BenchmarkStyle style = BenchmarkStyle::kCorl2017;
  double dt = 0.1;
  double goal_radius = 2.0;
  double timeout_speed = 10.0 / 3.6;  // allowed time = route length / this
  sim::CameraConfig camera;
  sim::SimParams sim;
  control::PidState pid;
  sim::AutopilotParams expert;  // reference runs for the RMSE
};

/// kError marks an episode cut short by an exception from the agent or the
/// simulator; the message is kept in EpisodeResult::error.
enum class FailureReason { kNone, kTimeout, kCollision, kError };
std::string_view to_string(FailureReason r);
FailureReason failure_reason_from_string(std::string_view s);

struct TrajectoryPoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double speed = 0.0;
  double yaw_rate = 0.0;

  bool operator==(const TrajectoryPoint&) const = default;
};

/// What the agent asked for and what reached the vehicle at one tick.
struct ControlLogEntry {
  double t = 0.0;
  NavCommand command = NavCommand::kLaneFollow;
  double steer = 0.0;  // normalized, as executed
  double speed = 0.0;  // normalized target
  double throttle = 0.0;
  double brake = 0.0;

  bool operator==(const ControlLogEntry&) const = default;
};

struct EpisodeResult {
  bool success = false;
  FailureReason failure = FailureReason::kNone;
  std::string error;
  std::vector<TrajectoryPoint> trajectory;  // initial state first
  std::vector<ControlLogEntry> commands_log;
  std::string agent;
  std::string task;
  std::string weather;
  int route_id = 0;
  int repetition = 0;
  uint64_t seed = 0;  // scenario seed
  double route_length = 0.0;
  double time_limit = 0.0;

  bool operator==(const EpisodeResult&) const = default;
};

/// Closed loop at 1/dt Hz: the planner issues the route command, the agent
/// returns controls, the PID turns the speed target into throttle/brake.
/// Ends at the goal, on timeout, or (NoCrash only) at the first collision or
/// road exit. Exceptions become kError failures.
EpisodeResult run_episode(Agent& agent, const sim::TownMap& town, const sim::WorldState& initial,
                          const sim::RouteSpec& route, const EpisodeRules& rules);

}  // namespace fusiondrive::bench
