#include "evalbench/episode.hpp"

#include <algorithm>

#include "common/error.hpp"
#include "simworld/collision.hpp"

namespace fusiondrive::bench {
namespace {

TrajectoryPoint point_of(const sim::WorldState& s) {
  return {s.time, s.ego.x, s.ego.y, s.ego.heading, s.ego.speed, s.ego.yaw_rate};
}

}  // namespace

std::string_view to_string(BenchmarkStyle s) { return s == BenchmarkStyle::kNoCrash ? "nocrash" : "corl2017"; }

BenchmarkStyle benchmark_style_from_string(std::string_view s) {
  if (s == "corl2017") return BenchmarkStyle::kCorl2017;
  if (s == "nocrash") return BenchmarkStyle::kNoCrash;
  throw Error(ErrorCode::kConfig, "unknown benchmark style '" + std::string(s) + "'");
}

std::string_view to_string(FailureReason r) {
  switch (r) {
    case FailureReason::kNone: return "none";
    case FailureReason::kTimeout: return "timeout";
    case FailureReason::kCollision: return "collision";
    case FailureReason::kError: return "error";
  }
  return "error";
}

FailureReason failure_reason_from_string(std::string_view s) {
  for (auto r : {FailureReason::kNone, FailureReason::kTimeout, FailureReason::kCollision, FailureReason::kError})
    if (to_string(r) == s) return r;
  throw Error(ErrorCode::kInvalidArgument, "unknown failure reason '" + std::string(s) + "'");
}

EpisodeResult run_episode(Agent& agent, const sim::TownMap& town, const sim::WorldState& initial,
                          const sim::RouteSpec& route, const EpisodeRules& rules) {
  if (!(rules.dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "dt must be positive");
  EpisodeResult r;
  r.agent = agent.name();
  r.route_length = route.length();
  r.time_limit = route.length() / rules.timeout_speed;
  r.trajectory.push_back(point_of(initial));

  sim::WorldState state = initial;
  control::PidState pid = rules.pid;
  pid.reset();
  sim::RouteTracker tracker(route);
  try {
    agent.reset(route);
    for (;;) {
      if (norm(state.ego.position() - route.goal) < rules.goal_radius) {
        r.success = true;
        break;
      }
      if (state.time - initial.time >= r.time_limit) {
        r.failure = FailureReason::kTimeout;
        break;
      }
      tracker.update(state.ego.position());
      AgentInput in;
      in.state = &state;
      in.command = sim::command_at(route, tracker.progress());
      sim::Observation obs;
      if (agent.needs_observation()) {
        obs = sim::render_observation(town, state, rules.camera);
        in.observation = &obs;
      }
      const AgentOutput out = agent.act(in);
      const double steer = std::clamp(out.controls.steer, -1.0, 1.0);
      const double speed = std::clamp(out.controls.speed, 0.0, 1.0);
      const auto act = control::pid_update(speed * rules.sim.vehicle.v_max, state.ego.speed, rules.dt, pid);
      r.commands_log.push_back({state.time, in.command, steer, speed, act.throttle, act.brake});
      state = sim::step(town, state, {steer, act.throttle, act.brake}, rules.dt, rules.sim);
      r.trajectory.push_back(point_of(state));
      if (rules.style == BenchmarkStyle::kNoCrash &&
          sim::check_collision(town, state).kind != sim::CollisionKind::kNone) {
        r.failure = FailureReason::kCollision;
        break;
      }
    }
  } catch (const Error& e) {
    r.success = false;
    r.failure = FailureReason::kError;
    r.error = e.what();
  }
  return r;
}

}  // namespace fusiondrive::bench
