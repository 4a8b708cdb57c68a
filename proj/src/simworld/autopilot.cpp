#include "simworld/autopilot.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace fusiondrive::sim {
namespace {

bool corridor_blocked(const WorldState& state, const Polyline& path, double s,
                      const AutopilotParams& params) {
  const double reach = state.ego.half_length + params.stop_distance;
  const double clearance = state.ego.half_width + params.corridor_margin;
  std::vector<OrientedBox> near;
  const Vec2 ego = state.ego.position();
  auto consider = [&](const VehicleState& a) {
    if (norm(a.position() - ego) < reach + 2.0 * clearance + a.half_length + a.half_width)
      near.push_back(a.box());
  };
  for (const auto& v : state.traffic_vehicles) consider(v.state);
  for (const auto& p : state.pedestrians) consider(p.state);
  if (near.empty()) return false;
  for (double d = 0.0; d <= reach + 1e-9; d += 0.5) {
    const Vec2 q = path.position_at(s + d);
    for (const auto& box : near)
      if (point_box_distance(q, box) < clearance) return true;
  }
  return false;
}

double heading_change_ahead(const Polyline& path, double s, double horizon) {
  double worst = 0.0;
  const double h0 = path.heading_at(s);
  for (double d = 1.0; d <= horizon; d += 1.0)
    worst = std::max(worst, std::abs(wrap_angle(path.heading_at(s + d) - h0)));
  return worst;
}

}  // namespace

AutopilotDecision autopilot_decide(const WorldState& state, const RouteSpec& route,
                                   const AutopilotParams& params, const VehicleParams& vehicle,
                                   std::optional<double> progress_hint) {
  const Polyline& path = route.path;
  const Vec2 p = state.ego.position();
  const auto proj = progress_hint
                        ? path.project(p, std::max(0.0, *progress_hint - 3.0), *progress_hint + 8.0)
                        : path.project(p);
  if (std::abs(proj.lateral) > params.off_route_bound || proj.distance > params.off_route_bound)
    throw Error(ErrorCode::kOffRoute, "ego left the route corridor");

  AutopilotDecision out;
  out.progress = progress_hint ? std::max(*progress_hint, proj.s) : proj.s;
  out.lateral = proj.lateral;

  const double lookahead = std::clamp(params.lookahead_gain * state.ego.speed + 2.0,
                                      params.lookahead_min, params.lookahead_max);
  const Vec2 target = path.position_at(proj.s + lookahead);
  const Vec2 d = target - p;
  const double dist = norm(d);
  double steer = 0.0;
  if (dist > 1e-9) {
    const Vec2 f = heading_vector(state.ego.heading);
    const double alpha = std::atan2(cross(f, d), dot(f, d));
    const double delta = std::atan(2.0 * vehicle.wheelbase * std::sin(alpha) / dist);
    steer = std::clamp(delta / deg2rad(vehicle.steer_scale_deg), -1.0, 1.0);
  }

  double speed = params.cruise_speed;
  if (heading_change_ahead(path, proj.s, 10.0) > deg2rad(20.0))
    speed = std::min(speed, params.turn_speed);
  out.blocked = corridor_blocked(state, path, proj.s, params);
  if (out.blocked) speed = 0.0;

  out.command.steer = steer;
  out.command.speed = std::clamp(speed / vehicle.v_max, 0.0, 1.0);
  return out;
}

ControlCommand autopilot_action(const WorldState& state, const RouteSpec& route,
                                const AutopilotParams& params, const VehicleParams& vehicle) {
  return autopilot_decide(state, route, params, vehicle).command;
}

AutopilotDecision Autopilot::decide(const WorldState& state) {
  AutopilotDecision d = autopilot_decide(state, *route_, params_, vehicle_, progress_);
  progress_ = d.progress;
  return d;
}

}  // namespace fusiondrive::sim
