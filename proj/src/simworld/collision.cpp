#include "simworld/collision.hpp"

namespace fusiondrive::sim {

CollisionReport check_collision(const TownMap& town, const WorldState& state) {
  const OrientedBox ego = state.ego.box();
  int index = 0;
  for (const auto& v : state.traffic_vehicles) {
    if (boxes_overlap(ego, v.state.box())) return {CollisionKind::kEgoVsAgent, index};
    ++index;
  }
  for (const auto& p : state.pedestrians) {
    if (boxes_overlap(ego, p.state.box())) return {CollisionKind::kEgoVsAgent, index};
    ++index;
  }
  if (!town.on_road(state.ego.position())) return {CollisionKind::kEgoOffRoad, -1};
  return {};
}

}  // namespace fusiondrive::sim
