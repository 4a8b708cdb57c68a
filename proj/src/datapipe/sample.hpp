#pragma once

#include <string>
#include <vector>

#include "common/commands.hpp"
#include "common/raster.hpp"
#include "simworld/geometry.hpp"
#include "simworld/town.hpp"

namespace fusiondrive::data {

struct Sample {
  ImageF rgb;          // W x H x 3 in [0, 1]
  ImageF depth;        // W x H x 1 in [0, 1]
  LabelImage semantic; // class ids 0..4
  NavCommand nav_command = NavCommand::kLaneFollow;
  double steer_gt = 0.0;  // normalized [-1, 1]
  double speed_gt = 0.0;  // m/s, expert target speed
  bool noise_flag = false;
  sim::Pose pose;
  double timestamp = 0.0;
  double measured_speed = 0.0;

  bool operator==(const Sample&) const = default;
};

struct BalanceReport {
  size_t input = 0;
  size_t lane_follow = 0;
  size_t other_commands = 0;
  size_t small_steer = 0;
  size_t large_steer = 0;
  size_t stage1 = 0;  // small-steer samples kept
  size_t stage2 = 0;  // lane_follow count after large-steer duplication
  size_t stage3 = 0;  // lane_follow count after slow-sample duplication
  size_t output = 0;  // stage3 + other_commands

  bool operator==(const BalanceReport&) const = default;
};

struct Dataset {
  std::vector<Sample> samples;
  sim::TownId town_id = sim::TownId::kTrain;
  BalanceReport balancing_report;
};

/// Removes the noise-flagged samples, keeping order. Logs a warning to
/// stderr when nothing survives.
Dataset strip_noise(const Dataset& dataset);

}  // namespace fusiondrive::data
