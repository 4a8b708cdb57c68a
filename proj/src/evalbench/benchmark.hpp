#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "evalbench/episode.hpp"
#include "evalbench/metrics.hpp"
#include "simworld/route.hpp"
#include "simworld/town.hpp"

namespace fusiondrive::bench {

struct TaskSpec {
  std::string name;
  sim::RouteKind route_kind = sim::RouteKind::kStraight;
  int vehicles = 0;
  int pedestrians = 0;

  bool empty_traffic() const { return vehicles == 0 && pedestrians == 0; }
  bool operator==(const TaskSpec&) const = default;
};

struct TrafficDensity {
  int vehicles = 0;
  int pedestrians = 0;
};
inline constexpr TrafficDensity kRegularTraffic{10, 5};
inline constexpr TrafficDensity kDenseTraffic{25, 15};

struct BenchmarkSpec {
  BenchmarkStyle style = BenchmarkStyle::kCorl2017;
  std::vector<TaskSpec> tasks;
  int routes_per_task = 25;
  std::string weather_set = "training";  // training | testing | custom
  std::vector<std::string> weathers;
  sim::TownId town = sim::TownId::kTrain;
  int repetitions = 3;
  unsigned long long seed = 0;
  double min_navigation_length = 150.0;

  /// straight, one_turn, navigation (empty) and nav_dynamic (regular traffic).
  static BenchmarkSpec corl2017(sim::TownId town, const std::string& weather_set = "training");
  /// empty, regular and dense traffic on navigation routes.
  static BenchmarkSpec nocrash(sim::TownId town, const std::string& weather_set = "training");

  /// Throws Error(kConfig).
  void validate() const;
  bool operator==(const BenchmarkSpec&) const = default;
};

/// Weather names of a named set for the style.
std::vector<std::string> weather_names(BenchmarkStyle style, const std::string& name);

void to_json(nlohmann::json& j, const TaskSpec& t);
void from_json(const nlohmann::json& j, TaskSpec& t);
void to_json(nlohmann::json& j, const BenchmarkSpec& s);
void from_json(const nlohmann::json& j, BenchmarkSpec& s);

struct TaskReport {
  std::string task;
  int episodes = 0;
  std::vector<double> repetition_rates;  // percent, one per repetition
  MeanStd success;
  std::optional<double> rmse;  // empty-traffic tasks with at least one success
  int rmse_episodes = 0;       // N_e

  bool operator==(const TaskReport&) const = default;
};

struct BenchmarkReport {
  std::string agent;
  BenchmarkStyle style = BenchmarkStyle::kCorl2017;
  sim::TownId town = sim::TownId::kTrain;
  std::string weather_set;
  std::vector<TaskReport> tasks;
  std::vector<EpisodeResult> episodes;         // agent runs
  std::vector<EpisodeResult> expert_episodes;  // reference runs for the RMSE

  bool operator==(const BenchmarkReport&) const = default;
};

/// The benchmark routes of one task; the same for every agent and repetition.
std::vector<sim::RouteSpec> benchmark_routes(const sim::TownMap& town, const BenchmarkSpec& spec, size_t task);

/// Scenario seed of one episode.
uint64_t episode_seed(const BenchmarkSpec& spec, size_t task, int route, size_t weather, int repetition);

using EpisodeCallback = std::function<void(const EpisodeResult&)>;

/// Every task x route x weather x repetition. Success rates are per
/// repetition over routes x weathers; the RMSE compares empty-traffic runs
/// against the expert on the same scenarios.
BenchmarkReport run_benchmark(Agent& agent, const BenchmarkSpec& spec, const EpisodeRules& rules,
                              const EpisodeCallback& on_episode = {});

/// Per-task rows of one or more reports.
std::string report_csv(std::span<const BenchmarkReport> reports);

/// Task rows recounted from the archived episodes (used to check reports).
std::vector<TaskReport> recount(const BenchmarkReport& report, int repetitions);

}  // namespace fusiondrive::bench
