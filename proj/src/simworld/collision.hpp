#pragma once

#include "simworld/town.hpp"
#include "simworld/world.hpp"

namespace fusiondrive::sim {

enum class CollisionKind { kNone, kEgoVsAgent, kEgoOffRoad };

struct CollisionReport {
  CollisionKind kind = CollisionKind::kNone;
  /// Index into traffic_vehicles, or traffic_vehicles.size() + pedestrian index.
  int agent = -1;
};

/// Agent contact is reported before leaving the road.
CollisionReport check_collision(const TownMap& town, const WorldState& state);

}  // namespace fusiondrive::sim
