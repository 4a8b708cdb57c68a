#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "control/pid.hpp"
#include "datapipe/balance.hpp"
#include "datapipe/noise.hpp"
#include "evalbench/benchmark.hpp"
#include "evalbench/episode.hpp"
#include "model/model_config.hpp"
#include "simworld/autopilot.hpp"
#include "simworld/renderer.hpp"
#include "simworld/world.hpp"
#include "training/losses.hpp"
#include "training/trainer.hpp"

namespace fusiondrive::app {

struct Paths {
  std::string dataset_dir = "runs/dataset";
  std::string checkpoint_dir = "runs/checkpoints";
  std::string report_dir = "runs/reports";

  bool operator==(const Paths&) const = default;
};

struct CollectConfig {
  int episodes = 20;
  /// Episodes recorded in the test town for validation, out of `episodes`.
  int validation_episodes = 4;
  std::vector<std::string> route_kinds{"navigation", "one_turn", "straight"};
  std::vector<std::string> weathers{"clear_afternoon", "wet_afternoon", "hard_rain_afternoon", "clear_sunset"};
  int vehicles = 10;
  int pedestrians = 5;
  double min_navigation_length = 150.0;

  bool operator==(const CollectConfig&) const = default;
};

struct RunConfig {
  Paths paths;
  unsigned long long seed = 0;
  double dt = 0.1;
  double goal_radius = 2.0;
  double timeout_speed = 10.0 / 3.6;
  double stationary_limit_s = 10.0;
  sim::CameraConfig camera;
  sim::SimParams sim;
  sim::AutopilotParams autopilot;
  control::PidState pid;
  data::NoiseSchedule noise;
  CollectConfig collect;
  data::BalanceParams balance;
  model::ModelConfig model = model::desk_config();
  train::TrainConfig train;
  train::LossWeights loss;
  bench::BenchmarkSpec benchmark = bench::BenchmarkSpec::corl2017(sim::TownId::kTrain);

  bool operator==(const RunConfig&) const = default;
  /// Throws Error(kConfig) for inconsistent settings.
  void validate() const;
  bench::EpisodeRules episode_rules() const;
};

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

/// Missing keys keep their defaults. Throws Error(kConfig) for unreadable or
/// invalid files and Error(kMissingArtifact) when the file does not exist.
RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const std::filesystem::path& path, const RunConfig& config);

/// Applies "a.b.c=value" overrides; value is parsed as JSON, falling back to a
/// string. Throws Error(kConfig) for unknown keys.
RunConfig apply_overrides(const RunConfig& config, const std::vector<std::string>& overrides);

}  // namespace fusiondrive::app
