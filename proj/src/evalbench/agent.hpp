#pragma once

#include <memory>
#include <string>

#include "common/commands.hpp"
#include "model/driving_net.hpp"
#include "simworld/autopilot.hpp"
#include "simworld/renderer.hpp"
#include "simworld/route.hpp"
#include "simworld/world.hpp"

namespace fusiondrive::bench {

struct AgentInput {
  const sim::WorldState* state = nullptr;
  const sim::Observation* observation = nullptr;  // null when the agent needs none
  NavCommand command = NavCommand::kLaneFollow;
};

struct AgentOutput {
  ControlCommand controls;    // steer normalized, speed normalized by v_max
  nn::Tensor<float> semantics;  // empty for agents without a decoder
};

class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string name() const = 0;
  virtual bool needs_observation() const { return true; }
  /// Called once before each episode.
  virtual void reset(const sim::RouteSpec& route) {}
  virtual AgentOutput act(const AgentInput& input) = 0;
};

/// The scripted autopilot, reading the world state directly.
class ExpertAgent : public Agent {
 public:
  explicit ExpertAgent(sim::AutopilotParams params = {}, sim::VehicleParams vehicle = {})
      : params_(params), vehicle_(vehicle) {}

  std::string name() const override { return "expert"; }
  bool needs_observation() const override { return false; }
  void reset(const sim::RouteSpec& route) override;
  AgentOutput act(const AgentInput& input) override;

 private:
  sim::AutopilotParams params_;
  sim::VehicleParams vehicle_;
  sim::RouteSpec route_;
  std::unique_ptr<sim::Autopilot> autopilot_;
};

/// Fixed controls regardless of input.
class ConstantAgent : public Agent {
 public:
  ConstantAgent(double steer, double speed) : controls_{steer, speed} {}
  std::string name() const override { return "constant"; }
  bool needs_observation() const override { return false; }
  AgentOutput act(const AgentInput&) override { return {controls_, {}}; }

 private:
  ControlCommand controls_;
};

/// A trained network driving from the camera.
class ModelAgent : public Agent {
 public:
  ModelAgent(model::DrivingNet<float>& net, std::string name = "model") : net_(&net), name_(std::move(name)) {}

  std::string name() const override { return name_; }
  AgentOutput act(const AgentInput& input) override;

 private:
  model::DrivingNet<float>* net_;
  std::string name_;
};

}  // namespace fusiondrive::bench
