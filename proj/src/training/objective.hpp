#pragma once

#include <cstdint>
#include <span>

#include "common/commands.hpp"
#include "model/driving_net.hpp"
#include "training/losses.hpp"

namespace fusiondrive::train {

struct LossBreakdown {
  double total = 0.0;
  double steer = 0.0;
  double speed = 0.0;
  double scene = 0.0;

  bool operator==(const LossBreakdown&) const = default;
};

template <typename T>
struct BatchTargets {
  std::span<const NavCommand> commands;
  std::span<const T> steer;
  std::span<const T> speed;
  std::span<const uint8_t> labels;  // n x size x size; ignored without a decoder
};

/// Forward pass and the weighted joint loss; with `backward` the gradients are
/// accumulated into the net's parameters. The scene term is skipped when the
/// net has no decoder or lambda3 is 0.
template <typename T>
LossBreakdown batch_objective(model::DrivingNet<T>& net, const nn::Tensor<T>& x, const BatchTargets<T>& targets,
                              const LossWeights& weights, bool training, bool backward);

}  // namespace fusiondrive::train
