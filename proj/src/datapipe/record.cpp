#include "datapipe/record.hpp"

#include <algorithm>

#include "common/error.hpp"
#include "simworld/collision.hpp"

namespace fusiondrive::data {

std::string_view to_string(RecordEnd end) {
  switch (end) {
    case RecordEnd::kGoalReached: return "goal_reached";
    case RecordEnd::kTimeout: return "timeout";
    case RecordEnd::kOffRoute: return "off_route";
    case RecordEnd::kCollision: return "collision";
    case RecordEnd::kOffRoad: return "off_road";
    case RecordEnd::kStationary: return "stationary";
  }
  return "unknown";
}

RecordSummary record_episode(const sim::TownMap& town, const sim::WorldState& initial,
                             const sim::RouteSpec& route, const RecordOptions& options,
                             uint64_t seed, const SampleSink& sink) {
  if (!(options.dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "dt must be positive");
  sim::Autopilot expert(route, options.autopilot, options.sim.vehicle);
  NoiseInjector noise(options.noise, seed, options.dt);
  control::PidState pid = options.pid;
  pid.reset();
  const double time_limit = route.length() / options.timeout_speed;

  RecordSummary summary;
  sim::WorldState state = initial;
  double stationary = 0.0;
  for (int64_t frame = 0;; ++frame) {
    if (norm(state.ego.position() - route.goal) < options.goal_radius) {
      summary.end = RecordEnd::kGoalReached;
      break;
    }
    if (state.time - initial.time > time_limit) {
      summary.end = RecordEnd::kTimeout;
      break;
    }
    sim::AutopilotDecision decision;
    try {
      decision = expert.decide(state);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kOffRoute) throw;
      summary.end = RecordEnd::kOffRoute;
      break;
    }

    sim::Observation obs = sim::render_observation(town, state, options.camera);
    const double perturbation = noise.next(frame);
    Sample sample;
    sample.rgb = std::move(obs.rgb);
    sample.depth = std::move(obs.depth);
    sample.semantic = std::move(obs.semantic);
    sample.nav_command = sim::command_at(route, decision.progress);
    sample.steer_gt = decision.command.steer;
    sample.speed_gt = decision.command.speed * options.sim.vehicle.v_max;
    sample.noise_flag = options.noise.flagged(frame, options.dt);
    sample.pose = state.ego.pose();
    sample.timestamp = state.time;
    sample.measured_speed = state.ego.speed;
    summary.flagged += sample.noise_flag ? 1 : 0;
    ++summary.frames;
    const double target_speed = sample.speed_gt;
    sink(std::move(sample));

    const double steer = std::clamp(decision.command.steer + perturbation, -1.0, 1.0);
    const control::Actuation act = control::pid_update(target_speed, state.ego.speed, options.dt, pid);
    state = sim::step(town, state, {steer, act.throttle, act.brake}, options.dt, options.sim);

    const sim::CollisionReport hit = sim::check_collision(town, state);
    if (hit.kind == sim::CollisionKind::kEgoVsAgent) {
      summary.end = RecordEnd::kCollision;
      break;
    }
    if (hit.kind == sim::CollisionKind::kEgoOffRoad) {
      summary.end = RecordEnd::kOffRoad;
      break;
    }
    stationary = state.ego.speed < 0.05 ? stationary + options.dt : 0.0;
    if (stationary > options.stationary_limit_s) {
      summary.end = RecordEnd::kStationary;
      break;
    }
  }
  summary.duration = state.time - initial.time;
  return summary;
}

std::vector<Sample> record_episode(const sim::TownMap& town, const sim::WorldState& initial,
                                   const sim::RouteSpec& route, const RecordOptions& options,
                                   uint64_t seed) {
  std::vector<Sample> out;
  record_episode(town, initial, route, options, seed, [&out](Sample&& s) { out.push_back(std::move(s)); });
  return out;
}

}  // namespace fusiondrive::data
