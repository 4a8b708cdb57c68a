#pragma once

#include <optional>

#include "common/commands.hpp"
#include "simworld/route.hpp"
#include "simworld/world.hpp"

namespace fusiondrive::sim {

struct AutopilotParams {
  double cruise_speed = 6.0;      // m/s
  double turn_speed = 4.0;        // m/s through sharp route curvature
  double stop_distance = 6.0;     // m ahead of the front bumper
  double corridor_margin = 0.5;   // m beyond the ego half width
  double lookahead_gain = 0.6;    // s
  double lookahead_min = 3.0;     // m
  double lookahead_max = 8.0;     // m
  double off_route_bound = 3.0;   // m of lateral deviation

  bool operator==(const AutopilotParams&) const = default;
};

/// Expert decision with the quantities it was derived from.
struct AutopilotDecision {
  ControlCommand command;  // steer normalized, speed normalized by v_max
  double progress = 0.0;   // arc length of the ego projection on the route
  double lateral = 0.0;
  bool blocked = false;
};

/// Stateless expert step; projects the ego onto the whole route, or onto a
/// window around `progress_hint` when given. Throws Error(kOffRoute).
AutopilotDecision autopilot_decide(const WorldState& state, const RouteSpec& route,
                                   const AutopilotParams& params = {},
                                   const VehicleParams& vehicle = {},
                                   std::optional<double> progress_hint = std::nullopt);

ControlCommand autopilot_action(const WorldState& state, const RouteSpec& route,
                                const AutopilotParams& params = {},
                                const VehicleParams& vehicle = {});

/// Expert bound to one route that remembers its progress between steps.
class Autopilot {
 public:
  Autopilot(const RouteSpec& route, AutopilotParams params = {}, VehicleParams vehicle = {})
      : route_(&route), params_(params), vehicle_(vehicle) {}

  AutopilotDecision decide(const WorldState& state);
  ControlCommand act(const WorldState& state) { return decide(state).command; }
  double progress() const { return progress_; }

 private:
  const RouteSpec* route_;
  AutopilotParams params_;
  VehicleParams vehicle_;
  double progress_ = 0.0;
};

}  // namespace fusiondrive::sim
