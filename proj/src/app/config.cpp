#include "app/config.hpp"

#include <fstream>

#include "common/error.hpp"
#include "simworld/weather.hpp"

namespace fusiondrive {
namespace sim {
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CameraConfig, image_width, image_height, horizontal_fov,
                                                mount_height, pitch, far_plane)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(VehicleParams, wheelbase, v_max, steer_scale_deg,
                                                max_wheel_angle_deg, max_accel, max_brake, rolling_c0, rolling_c1,
                                                half_length, half_width)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TrafficParams, vehicle_speed_min, vehicle_speed_max,
                                                follow_distance, standstill_gap, respawn_after_stopped_s,
                                                pedestrian_cross_rate, pedestrian_clearance, spawn_clearance,
                                                ego_spawn_exclusion)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SimParams, vehicle, traffic)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(AutopilotParams, cruise_speed, turn_speed, stop_distance,
                                                corridor_margin, lookahead_gain, lookahead_min, lookahead_max,
                                                off_route_bound)
}  // namespace sim
namespace control {
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PidState, kp, ki, kd, integral_limit)
}  // namespace control
namespace data {
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(NoiseSchedule, period, duration, phase, magnitude_min,
                                                magnitude_max, ramp_fraction)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(BalanceParams, small_steer_deg, keep_fraction, large_multiplicity,
                                                slow_speed, slow_multiplicity)
}  // namespace data

namespace app {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(Paths, dataset_dir, checkpoint_dir, report_dir)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CollectConfig, episodes, validation_episodes, route_kinds, weathers,
                                                vehicles, pedestrians, min_navigation_length)

void to_json(nlohmann::json& j, const RunConfig& c) {
  j = {{"paths", c.paths},
       {"seed", c.seed},
       {"dt", c.dt},
       {"goal_radius", c.goal_radius},
       {"timeout_speed", c.timeout_speed},
       {"stationary_limit_s", c.stationary_limit_s},
       {"camera", c.camera},
       {"sim", c.sim},
       {"autopilot", c.autopilot},
       {"pid", c.pid},
       {"noise", c.noise},
       {"collect", c.collect},
       {"balance", c.balance},
       {"model", c.model},
       {"train", c.train},
       {"loss", c.loss},
       {"benchmark", c.benchmark}};
}

void from_json(const nlohmann::json& j, RunConfig& c) {
  const RunConfig d;
  static const std::vector<std::string> known = {"paths", "seed", "dt", "goal_radius", "timeout_speed",
                                                 "stationary_limit_s", "camera", "sim", "autopilot", "pid",
                                                 "noise", "collect", "balance", "model", "train", "loss",
                                                 "benchmark"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw Error(ErrorCode::kConfig, "unknown config key '" + key + "'");
  c.paths = j.value("paths", d.paths);
  c.seed = j.value("seed", d.seed);
  c.dt = j.value("dt", d.dt);
  c.goal_radius = j.value("goal_radius", d.goal_radius);
  c.timeout_speed = j.value("timeout_speed", d.timeout_speed);
  c.stationary_limit_s = j.value("stationary_limit_s", d.stationary_limit_s);
  c.camera = j.value("camera", d.camera);
  c.sim = j.value("sim", d.sim);
  c.autopilot = j.value("autopilot", d.autopilot);
  c.pid = j.value("pid", d.pid);
  c.noise = j.value("noise", d.noise);
  c.collect = j.value("collect", d.collect);
  c.balance = j.value("balance", d.balance);
  c.model = j.value("model", d.model);
  c.train = j.value("train", d.train);
  c.loss = j.value("loss", d.loss);
  c.benchmark = j.value("benchmark", d.benchmark);
}

void RunConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfig, what); };
  if (!(dt > 0.0)) fail("dt must be positive");
  if (!(goal_radius > 0.0) || !(timeout_speed > 0.0)) fail("goal_radius and timeout_speed must be positive");
  if (camera.image_width < 2 || camera.image_height < 2 || !(camera.far_plane > 0.0)) fail("invalid camera");
  if (collect.episodes < 1) fail("collect.episodes must be positive");
  if (collect.validation_episodes < 0 || collect.validation_episodes >= collect.episodes)
    fail("collect.validation_episodes must be below collect.episodes");
  if (collect.route_kinds.empty() || collect.weathers.empty()) fail("collect needs route kinds and weathers");
  for (const auto& w : collect.weathers) sim::weather_by_name(w);
  if (collect.vehicles < 0 || collect.pedestrians < 0) fail("negative traffic");
  if (balance.keep_fraction < 0.0 || balance.keep_fraction > 1.0) fail("balance.keep_fraction must be in [0, 1]");
  if (balance.large_multiplicity < 1 || balance.slow_multiplicity < 1) fail("balance multiplicities must be >= 1");
  if (loss.lambda1 < 0 || loss.lambda2 < 0 || loss.lambda3 < 0 || loss.alpha < 0 || loss.beta < 0 || loss.gamma < 0)
    fail("loss weights must be non-negative");
  model.validate();
  train.validate();
  benchmark.validate();
}

bench::EpisodeRules RunConfig::episode_rules() const {
  bench::EpisodeRules r;
  r.style = benchmark.style;
  r.dt = dt;
  r.goal_radius = goal_radius;
  r.timeout_speed = timeout_speed;
  r.camera = camera;
  r.sim = sim;
  r.pid = pid;
  r.expert = autopilot;
  return r;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingArtifact, "config file " + path.string() + " not found");
  RunConfig c;
  try {
    c = nlohmann::json::parse(in, nullptr, true, true).get<RunConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, "cannot parse " + path.string() + ": " + e.what());
  }
  c.validate();
  return c;
}

void save_run_config(const std::filesystem::path& path, const RunConfig& config) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << nlohmann::json(config).dump(2) << '\n';
}

RunConfig apply_overrides(const RunConfig& config, const std::vector<std::string>& overrides) {
  nlohmann::json j = config;
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::kConfig, "override '" + o + "' is not key=value");
    std::string pointer = "/" + o.substr(0, eq);
    std::replace(pointer.begin(), pointer.end(), '.', '/');
    const nlohmann::json::json_pointer ptr(pointer);
    if (!j.contains(ptr)) throw Error(ErrorCode::kConfig, "unknown config key '" + o.substr(0, eq) + "'");
    const std::string text = o.substr(eq + 1);
    nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    j[ptr] = value;
  }
  RunConfig out;
  try {
    out = j.get<RunConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("bad override: ") + e.what());
  }
  out.validate();
  return out;
}

}  // namespace app
}  // namespace fusiondrive
