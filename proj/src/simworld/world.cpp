#include "simworld/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "common/error.hpp"

namespace fusiondrive::sim {
namespace {

constexpr double kPedestrianHalfExtent = 0.3;
constexpr int kPlacementAttempts = 400;

bool overlaps_any(const OrientedBox& box, const WorldState& w, double clearance) {
  auto grown = [clearance](OrientedBox b) {
    b.half_length += clearance;
    b.half_width += clearance;
    return b;
  };
  const OrientedBox g = grown(box);
  if (boxes_overlap(g, w.ego.box())) return true;
  for (const auto& v : w.traffic_vehicles)
    if (boxes_overlap(g, v.state.box())) return true;
  for (const auto& p : w.pedestrians)
    if (boxes_overlap(g, p.state.box())) return true;
  return false;
}

void place_on_segment(TrafficVehicle& v, const TownMap& town) {
  const Polyline& path = town.segment(v.segment).path;
  const Vec2 p = path.position_at(v.s);
  v.state.x = p.x;
  v.state.y = p.y;
  v.state.heading = wrap_angle(path.heading_at(v.s));
}

std::vector<int> lane_ids(const TownMap& town) {
  std::vector<int> ids;
  for (const auto& seg : town.segments())
    if (seg.kind == SegmentKind::kLane) ids.push_back(seg.id);
  return ids;
}

bool try_place_vehicle(const TownMap& town, WorldState& w, TrafficVehicle& v,
                       const TrafficParams& traffic, double min_ego_distance) {
  const std::vector<int> lanes = lane_ids(town);
  for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
    const int seg = lanes[static_cast<size_t>(w.rng.uniform_int(0, static_cast<int64_t>(lanes.size()) - 1))];
    const double len = town.segment(seg).path.length();
    v.segment = seg;
    v.s = w.rng.uniform(0.0, len);
    place_on_segment(v, town);
    if (norm(v.state.position() - w.ego.position()) < min_ego_distance) continue;
    if (overlaps_any(v.state.box(), w, traffic.spawn_clearance)) continue;
    const auto& succ = town.segment(seg).successors;
    v.next_segment = succ.empty() ? -1
                                  : succ[static_cast<size_t>(w.rng.uniform_int(
                                        0, static_cast<int64_t>(succ.size()) - 1))];
    return true;
  }
  return false;
}

void update_pedestrian_pose(Pedestrian& p, const TownMap& town) {
  const GridLayout& g = town.layout();
  if (p.vertical_road) {
    p.state.x = g.xs[p.line] + p.lateral;
    p.state.y = p.along;
  } else {
    p.state.x = p.along;
    p.state.y = g.ys[p.line] + p.lateral;
  }
}

// Walkable interval along the road axis, kept clear of the junction squares.
std::pair<double, double> pedestrian_bounds(const Pedestrian& p, const TownMap& town) {
  const GridLayout& g = town.layout();
  const auto& axis = p.vertical_road ? g.ys : g.xs;
  const double keep_out = town.geometry().road_half_width() + town.geometry().sidewalk_width;
  return {axis[p.span] + keep_out, axis[p.span + 1] - keep_out};
}

struct RoadRef {
  bool vertical;
  int line;
  int span;
};

std::vector<RoadRef> roads(const TownMap& town) {
  std::vector<RoadRef> out;
  const GridLayout& g = town.layout();
  for (size_t j = 0; j < g.ys.size(); ++j)
    for (size_t i = 0; i + 1 < g.xs.size(); ++i)
      if (g.horizontal[j][i]) out.push_back({false, static_cast<int>(j), static_cast<int>(i)});
  for (size_t i = 0; i < g.xs.size(); ++i)
    for (size_t j = 0; j + 1 < g.ys.size(); ++j)
      if (g.vertical[i][j]) out.push_back({true, static_cast<int>(i), static_cast<int>(j)});
  return out;
}

double sidewalk_offset(const TownMap& town) {
  return town.geometry().road_half_width() + 0.5 * town.geometry().sidewalk_width;
}

bool try_place_pedestrian(const TownMap& town, WorldState& w, Pedestrian& p,
                          const TrafficParams& traffic) {
  const std::vector<RoadRef> all = roads(town);
  if (all.empty()) return false;
  for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
    const RoadRef r = all[static_cast<size_t>(w.rng.uniform_int(0, static_cast<int64_t>(all.size()) - 1))];
    p.vertical_road = r.vertical;
    p.line = r.line;
    p.span = r.span;
    p.side = w.rng.bernoulli(0.5) ? 1 : -1;
    p.direction = w.rng.bernoulli(0.5) ? 1 : -1;
    p.lateral = p.side * sidewalk_offset(town);
    const auto [lo, hi] = pedestrian_bounds(p, town);
    if (hi <= lo) continue;
    p.along = w.rng.uniform(lo, hi);
    p.mode = PedestrianMode::kWalking;
    update_pedestrian_pose(p, town);
    p.state.heading = p.vertical_road ? (p.direction > 0 ? std::numbers::pi / 2 : -std::numbers::pi / 2)
                                      : (p.direction > 0 ? 0.0 : std::numbers::pi);
    if (overlaps_any(p.state.box(), w, 0.2)) continue;
    return true;
  }
  return false;
}

// Distance ahead along the vehicle's own future path to the first agent box
// within the swept corridor.
double path_gap(const TownMap& town, const TrafficVehicle& self, const std::vector<OrientedBox>& others,
                double reach) {
  const double clearance = self.state.half_width + 0.8;
  std::vector<const OrientedBox*> near;
  for (const auto& b : others)
    if (norm(b.center - self.state.position()) < reach + clearance + b.half_length + b.half_width)
      near.push_back(&b);
  if (near.empty()) return std::numeric_limits<double>::infinity();
  const Polyline* path = &town.segment(self.segment).path;
  double s = self.s;
  bool on_next = false;
  for (double d = self.state.half_length; d <= reach; d += 0.5) {
    double at = s + d;
    if (!on_next && at > path->length() && self.next_segment >= 0) {
      s -= path->length();
      at = s + d;
      path = &town.segment(self.next_segment).path;
      on_next = true;
    }
    const Vec2 q = path->position_at(at);
    for (const OrientedBox* b : near)
      if (point_box_distance(q, *b) < clearance) return d - self.state.half_length;
  }
  return std::numeric_limits<double>::infinity();
}

int pick_successor(const TownMap& town, int segment, Rng& rng) {
  const auto& succ = town.segment(segment).successors;
  if (succ.empty()) return -1;
  return succ[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(succ.size()) - 1))];
}

void step_traffic_vehicle(const TownMap& town, const WorldState& prev, size_t index,
                          TrafficVehicle& v, double dt, const TrafficParams& traffic,
                          Rng& rng) {
  const VehicleState& me = prev.traffic_vehicles[index].state;
  std::vector<OrientedBox> others;
  others.reserve(prev.traffic_vehicles.size() + prev.pedestrians.size() + 1);
  // Grown by the distance each agent can cover during this step.
  auto reach_box = [dt](const VehicleState& a) {
    OrientedBox b = a.box();
    b.half_length += a.speed * dt + 0.1;
    b.half_width += a.speed * dt + 0.1;
    return b;
  };
  others.push_back(reach_box(prev.ego));
  for (size_t k = 0; k < prev.traffic_vehicles.size(); ++k)
    if (k != index) others.push_back(reach_box(prev.traffic_vehicles[k].state));
  for (const auto& p : prev.pedestrians) others.push_back(reach_box(p.state));
  const double gap = path_gap(town, prev.traffic_vehicles[index], others,
                              me.half_length + traffic.follow_distance);

  double target = v.cruise_speed;
  if (gap < traffic.standstill_gap) {
    target = 0.0;
  } else if (gap < traffic.follow_distance) {
    target = v.cruise_speed * (gap - traffic.standstill_gap) /
             (traffic.follow_distance - traffic.standstill_gap);
  }
  const double accel = std::clamp((target - me.speed) / dt, -6.0, 2.0);
  v.state.speed = std::max(0.0, me.speed + accel * dt);
  v.s += v.state.speed * dt;
  for (;;) {
    const double len = town.segment(v.segment).path.length();
    if (v.s <= len) break;
    if (v.next_segment < 0) {
      v.s = len;
      v.state.speed = 0.0;
      break;
    }
    v.s -= len;
    v.segment = v.next_segment;
    v.next_segment = pick_successor(town, v.segment, rng);
  }
  place_on_segment(v, town);
  if (v.state.speed > 0.0) {
    const OrientedBox mine = v.state.box();
    for (const auto& b : others) {
      if (boxes_overlap(mine, b)) {
        // Never move into contact; hold the previous pose.
        v = prev.traffic_vehicles[index];
        v.state.speed = 0.0;
        break;
      }
    }
  }
  v.state.yaw_rate = wrap_angle(v.state.heading - me.heading) / dt;
  v.stopped_time = v.state.speed < 0.05 ? v.stopped_time + dt : 0.0;
}

void step_pedestrian(const TownMap& town, const WorldState& prev, Pedestrian& p, double dt,
                     const TrafficParams& traffic, Rng& rng) {
  const Vec2 before = p.state.position();
  if (p.mode == PedestrianMode::kWalking) {
    const auto [lo, hi] = pedestrian_bounds(p, town);
    p.along += p.direction * p.walk_speed * dt;
    if (p.along > hi) {
      p.along = hi;
      p.direction = -1;
    } else if (p.along < lo) {
      p.along = lo;
      p.direction = 1;
    }
    if (rng.bernoulli(traffic.pedestrian_cross_rate * dt)) {
      bool clear = norm(prev.ego.position() - before) > traffic.pedestrian_clearance;
      for (const auto& v : prev.traffic_vehicles)
        clear = clear && norm(v.state.position() - before) > traffic.pedestrian_clearance;
      if (clear) p.mode = PedestrianMode::kCrossing;
    }
  } else {
    const double target = -p.side * sidewalk_offset(town);
    const double delta = target - p.lateral;
    const double stride = p.walk_speed * dt;
    Pedestrian probe = p;
    probe.lateral += std::copysign(std::min(stride, std::abs(delta)), delta);
    update_pedestrian_pose(probe, town);
    bool blocked = point_box_distance(probe.state.position(), prev.ego.box()) < 1.0;
    for (const auto& v : prev.traffic_vehicles)
      blocked = blocked || point_box_distance(probe.state.position(), v.state.box()) < 1.0;
    if (blocked) {
      // Waits at the current spot.
    } else if (std::abs(delta) <= stride) {
      p.lateral = target;
      p.side = -p.side;
      p.mode = PedestrianMode::kWalking;
    } else {
      p.lateral += std::copysign(stride, delta);
    }
  }
  update_pedestrian_pose(p, town);
  const Vec2 moved = p.state.position() - before;
  const double heading = norm(moved) > 1e-9 ? std::atan2(moved.y, moved.x) : p.state.heading;
  p.state.yaw_rate = wrap_angle(heading - p.state.heading) / dt;
  p.state.heading = wrap_angle(heading);
  p.state.speed = norm(moved) / dt;
}

}  // namespace

double wheel_angle(double steer_norm, const VehicleParams& params) {
  const double s = std::clamp(steer_norm, -1.0, 1.0);
  const double limit = deg2rad(params.max_wheel_angle_deg);
  return std::clamp(s * deg2rad(params.steer_scale_deg), -limit, limit);
}

VehicleState integrate_ego(const VehicleState& ego, const EgoControls& controls, double dt,
                           const VehicleParams& params) {
  const double throttle = std::clamp(controls.throttle, 0.0, 1.0);
  const double brake = std::clamp(controls.brake, 0.0, 1.0);
  const double delta = wheel_angle(controls.steer, params);

  VehicleState next = ego;
  const double v = ego.speed;
  next.x = ego.x + v * std::cos(ego.heading) * dt;
  next.y = ego.y + v * std::sin(ego.heading) * dt;
  const double dtheta = (v / params.wheelbase) * std::tan(delta) * dt;
  next.heading = wrap_angle(ego.heading + dtheta);
  next.yaw_rate = dtheta / dt;

  double accel = params.max_accel * throttle - params.max_brake * brake;
  if (v > 0.0) accel -= params.rolling_c0 + params.rolling_c1 * v;
  next.speed = std::clamp(v + accel * dt, 0.0, params.v_max);
  return next;
}

WorldState spawn_scenario(const TownMap& town, const ScenarioSpec& spec, const SimParams& params) {
  if (spec.n_vehicles < 0 || spec.n_pedestrians < 0)
    throw Error(ErrorCode::kInvalidArgument, "agent counts must be non-negative");

  double lane_length = 0.0;
  for (const auto& seg : town.segments())
    if (seg.kind == SegmentKind::kLane) lane_length += seg.path.length();
  const double vehicle_slot = 2.0 * params.vehicle.half_length + 2.0 * params.traffic.spawn_clearance;
  const double vehicle_capacity = std::floor(lane_length / vehicle_slot);
  const double walk_capacity = std::floor(2.0 * town.total_road_length() / 1.0);
  if (spec.n_vehicles > vehicle_capacity || spec.n_pedestrians > walk_capacity)
    throw Error(ErrorCode::kPlacementInfeasible, "agent counts exceed map capacity");

  WorldState w;
  w.weather = spec.weather;
  w.rng = Rng(spec.seed);
  w.ego.half_length = params.vehicle.half_length;
  w.ego.half_width = params.vehicle.half_width;
  if (spec.ego_start) {
    w.ego.x = spec.ego_start->x;
    w.ego.y = spec.ego_start->y;
    w.ego.heading = wrap_angle(spec.ego_start->heading);
  } else {
    const std::vector<int> lanes = lane_ids(town);
    if (lanes.empty()) throw Error(ErrorCode::kPlacementInfeasible, "town has no lanes");
    TrafficVehicle probe;
    probe.segment = lanes[static_cast<size_t>(w.rng.uniform_int(0, static_cast<int64_t>(lanes.size()) - 1))];
    probe.s = w.rng.uniform(0.0, town.segment(probe.segment).path.length());
    place_on_segment(probe, town);
    w.ego.x = probe.state.x;
    w.ego.y = probe.state.y;
    w.ego.heading = probe.state.heading;
  }

  for (int k = 0; k < spec.n_vehicles; ++k) {
    TrafficVehicle v;
    v.state.half_length = params.vehicle.half_length;
    v.state.half_width = params.vehicle.half_width;
    v.cruise_speed = w.rng.uniform(params.traffic.vehicle_speed_min, params.traffic.vehicle_speed_max);
    v.color_id = static_cast<uint32_t>(w.rng.next());
    if (!try_place_vehicle(town, w, v, params.traffic, params.traffic.ego_spawn_exclusion))
      throw Error(ErrorCode::kPlacementInfeasible,
                  "could not place vehicle " + std::to_string(k));
    w.traffic_vehicles.push_back(v);
  }
  for (int k = 0; k < spec.n_pedestrians; ++k) {
    Pedestrian p;
    p.state.half_length = kPedestrianHalfExtent;
    p.state.half_width = kPedestrianHalfExtent;
    p.walk_speed = w.rng.uniform(1.1, 1.5);
    p.color_id = static_cast<uint32_t>(w.rng.next());
    if (!try_place_pedestrian(town, w, p, params.traffic))
      throw Error(ErrorCode::kPlacementInfeasible,
                  "could not place pedestrian " + std::to_string(k));
    w.pedestrians.push_back(p);
  }
  return w;
}

WorldState step(const TownMap& town, const WorldState& state, const EgoControls& controls,
                double dt, const SimParams& params) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "dt must be positive");
  WorldState next = state;
  next.ego = integrate_ego(state.ego, controls, dt, params.vehicle);

  for (size_t k = 0; k < next.traffic_vehicles.size(); ++k) {
    TrafficVehicle& v = next.traffic_vehicles[k];
    step_traffic_vehicle(town, state, k, v, dt, params.traffic, next.rng);
    if (v.stopped_time > params.traffic.respawn_after_stopped_s) {
      // Gridlock breaker: move the vehicle somewhere free, away from the ego.
      TrafficVehicle moved = v;
      WorldState probe = next;
      probe.traffic_vehicles.erase(probe.traffic_vehicles.begin() + static_cast<long>(k));
      if (try_place_vehicle(town, probe, moved, params.traffic, 30.0)) {
        moved.stopped_time = 0.0;
        moved.state.speed = 0.0;
        moved.state.yaw_rate = 0.0;
        next.rng = probe.rng;
        v = moved;
      }
    }
  }
  for (auto& p : next.pedestrians) step_pedestrian(town, state, p, dt, params.traffic, next.rng);

  next.tick = state.tick + 1;
  next.time = state.time + dt;
  return next;
}

}  // namespace fusiondrive::sim
