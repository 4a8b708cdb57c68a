#include "evalbench/agent.hpp"

#include <algorithm>

#include "common/error.hpp"
#include "training/train_set.hpp"

namespace fusiondrive::bench {

void ExpertAgent::reset(const sim::RouteSpec& route) {
  route_ = route;
  autopilot_ = std::make_unique<sim::Autopilot>(route_, params_, vehicle_);
}

AgentOutput ExpertAgent::act(const AgentInput& input) {
  if (!autopilot_) throw Error(ErrorCode::kInternal, "expert used before reset");
  return {autopilot_->act(*input.state), {}};
}

AgentOutput ModelAgent::act(const AgentInput& input) {
  if (!input.observation) throw Error(ErrorCode::kInvalidArgument, "model agent needs an observation");
  const auto& cfg = net_->config();
  const auto x = train::observation_input(input.observation->rgb, input.observation->depth, cfg.input_size,
                                          cfg.input_channels);
  const NavCommand cmd = input.command;
  auto out = net_->forward(x, std::span(&cmd, 1), false);
  AgentOutput result;
  result.controls.steer = std::clamp(static_cast<double>(out.controls.at(0, 0)), -1.0, 1.0);
  result.controls.speed = std::clamp(static_cast<double>(out.controls.at(0, 1)), 0.0, 1.0);
  result.semantics = std::move(out.semantics);
  return result;
}

}  // namespace fusiondrive::bench
