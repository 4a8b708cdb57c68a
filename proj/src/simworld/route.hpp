#pragma once

#include <vector>

#include "common/commands.hpp"
#include "common/rng.hpp"
#include "simworld/geometry.hpp"
#include "simworld/town.hpp"

namespace fusiondrive::sim {

struct RouteSpec {
  Pose start_pose;
  Vec2 goal;
  std::vector<int> waypoints;                   // lane-graph segment ids
  std::vector<NavCommand> per_segment_command;  // one per waypoint
  /// Centerline from the start projection to the goal projection.
  Polyline path;
  /// Arc-length interval of each waypoint on `path`.
  std::vector<std::pair<double, double>> segment_spans;
  double activation_radius = 15.0;

  double length() const { return path.length(); }
};

/// Shortest lane-graph route. Throws Error(kInvalidArgument) when start or
/// goal is off the mapped lanes and Error(kUnreachableGoal) when no path exists.
RouteSpec plan_route(const TownMap& town, const Pose& start, Vec2 goal,
                     double activation_radius = 15.0);

/// Command at arc length s: the turn label from `activation_radius` before a
/// junction connector until its exit, lane_follow elsewhere.
NavCommand command_at(const RouteSpec& route, double s);

enum class RouteKind { kStraight, kOneTurn, kNavigation };

/// Number of connectors on the route whose geometry turns (corners included).
int route_turn_count(const TownMap& town, const RouteSpec& route);

/// Random route of the given kind: straight routes never turn, one-turn routes
/// turn exactly once, navigation routes are at least `min_navigation_length`
/// long. Deterministic in the generator state.
RouteSpec sample_route(const TownMap& town, RouteKind kind, Rng& rng,
                       double min_navigation_length = 150.0);

/// Monotone progress estimate along a route.
class RouteTracker {
 public:
  explicit RouteTracker(const RouteSpec& route) : route_(&route) {}

  Polyline::Projection update(Vec2 position);
  double progress() const { return s_; }
  const RouteSpec& route() const { return *route_; }

 private:
  const RouteSpec* route_;
  double s_ = 0.0;
};

}  // namespace fusiondrive::sim
