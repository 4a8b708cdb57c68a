#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "control/pid.hpp"
#include "datapipe/noise.hpp"
#include "datapipe/sample.hpp"
#include "simworld/autopilot.hpp"
#include "simworld/renderer.hpp"
#include "simworld/route.hpp"
#include "simworld/world.hpp"

namespace fusiondrive::data {

struct RecordOptions {
  double dt = 0.1;
  double goal_radius = 2.0;
  double timeout_speed = 10.0 / 3.6;  // allowed time = route length / this
  double stationary_limit_s = 10.0;
  sim::CameraConfig camera;
  sim::AutopilotParams autopilot;
  sim::SimParams sim;
  control::PidState pid;
  NoiseSchedule noise;
};

enum class RecordEnd { kGoalReached, kTimeout, kOffRoute, kCollision, kOffRoad, kStationary };

std::string_view to_string(RecordEnd end);

struct RecordSummary {
  RecordEnd end = RecordEnd::kGoalReached;
  size_t frames = 0;
  size_t flagged = 0;
  double duration = 0.0;
};

using SampleSink = std::function<void(Sample&&)>;

/// Drives the expert along the route at 1/dt frames per second. The labels
/// are the expert's commands; the executed steer adds the scheduled noise.
/// Recording stops early (keeping the frames so far) when the expert leaves
/// the route, the ego collides or leaves the road, or it stays stationary.
RecordSummary record_episode(const sim::TownMap& town, const sim::WorldState& initial,
                             const sim::RouteSpec& route, const RecordOptions& options,
                             uint64_t seed, const SampleSink& sink);

std::vector<Sample> record_episode(const sim::TownMap& town, const sim::WorldState& initial,
                                   const sim::RouteSpec& route, const RecordOptions& options,
                                   uint64_t seed);

}  // namespace fusiondrive::data
