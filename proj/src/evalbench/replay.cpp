#include "evalbench/replay.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "common/error.hpp"
#include "common/png_io.hpp"
#include "evalbench/plot.hpp"
#include "simworld/weather.hpp"

namespace fusiondrive::bench {
namespace {

std::string frame_name(size_t k, const char* kind) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "frame_%05zu_%s.png", k, kind);
  return buf;
}

Raster<uint16_t> depth16(const ImageF& depth) {
  Raster<uint16_t> out(depth.width, depth.height, 1);
  for (size_t i = 0; i < depth.data.size(); ++i)
    out.data[i] = static_cast<uint16_t>(std::lround(std::clamp(depth.data[i], 0.0f, 1.0f) * 65535.0f));
  return out;
}

}  // namespace

double integrated_heading(std::span<const TrajectoryPoint> traj) {
  if (traj.empty()) throw Error(ErrorCode::kEmptyInput, "empty trajectory");
  double h = traj.front().heading;
  for (size_t i = 1; i < traj.size(); ++i) h += traj[i].yaw_rate * (traj[i].t - traj[i - 1].t);
  return sim::wrap_angle(h);
}

size_t find_episode(const Archive& archive, const std::string& task, int route, int repetition,
                    const std::string& weather) {
  for (size_t i = 0; i < archive.episodes.size(); ++i) {
    const auto& e = archive.episodes[i];
    if (e.task == task && e.route_id == route && e.repetition == repetition && (weather.empty() || e.weather == weather))
      return i;
  }
  throw Error(ErrorCode::kMissingArtifact, "no archived episode for task " + task + " route " + std::to_string(route));
}

ReplaySummary replay_episode(const Archive& archive, size_t index, const EpisodeRules& rules,
                             const std::filesystem::path& out_dir, const ReplayOptions& options) {
  if (index >= archive.episodes.size()) throw Error(ErrorCode::kInvalidArgument, "episode index out of range");
  const EpisodeResult& ep = archive.episodes[index];
  const BenchmarkSpec& spec = archive.spec;
  size_t task = spec.tasks.size();
  for (size_t t = 0; t < spec.tasks.size(); ++t)
    if (spec.tasks[t].name == ep.task) task = t;
  if (task == spec.tasks.size()) throw Error(ErrorCode::kMissingArtifact, "task " + ep.task + " not in the spec");

  const sim::TownMap& town = sim::builtin_town(spec.town);
  const auto routes = benchmark_routes(town, spec, task);
  const sim::RouteSpec& route = routes.at(static_cast<size_t>(ep.route_id));
  sim::ScenarioSpec scenario;
  scenario.n_vehicles = spec.tasks[task].vehicles;
  scenario.n_pedestrians = spec.tasks[task].pedestrians;
  scenario.weather = sim::weather_by_name(ep.weather);
  scenario.seed = ep.seed;
  scenario.ego_start = route.start_pose;

  std::filesystem::create_directories(out_dir);
  ReplaySummary summary;
  sim::WorldState state = sim::spawn_scenario(town, scenario, rules.sim);
  const int stride = std::max(1, options.frame_stride);
  for (size_t k = 0; k <= ep.commands_log.size(); ++k) {
    if (k < ep.trajectory.size()) {
      const auto& p = ep.trajectory[k];
      summary.max_deviation = std::max(summary.max_deviation, std::hypot(state.ego.x - p.x, state.ego.y - p.y));
    }
    const bool want = options.frames && k % stride == 0 &&
                      (options.max_frames < 0 || summary.frames_written < static_cast<size_t>(options.max_frames));
    if (want) {
      const auto obs = sim::render_observation(town, state, rules.camera);
      write_png(out_dir / frame_name(k, "rgb"), to_rgb8(obs.rgb));
      write_png16(out_dir / frame_name(k, "depth"), depth16(obs.depth));
      write_png(out_dir / frame_name(k, "semantic"), colorize_semantics(obs.semantic));
      ++summary.frames_written;
    }
    if (k == ep.commands_log.size()) break;
    const auto& c = ep.commands_log[k];
    state = sim::step(town, state, {c.steer, c.throttle, c.brake}, rules.dt, rules.sim);
    ++summary.ticks;
  }

  std::vector<Series> series;
  for (const auto& e : archive.expert_episodes)
    if (e.task == ep.task && e.route_id == ep.route_id && e.repetition == ep.repetition && e.weather == ep.weather &&
        !e.trajectory.empty())
      series.push_back({"expert", e.trajectory, {30, 140, 60}});
  series.push_back({ep.agent, ep.trajectory, {200, 30, 30}});
  write_png(out_dir / "trajectory.png", plot_trajectories(town, &route.path, series));
  write_png(out_dir / "yaw_rate.png", plot_yaw_rates(series));

  std::ofstream csv(out_dir / "trajectory.csv", std::ios::trunc);
  csv.precision(10);
  csv << "series,t,x,y,heading,speed,yaw_rate\n";
  for (const auto& s : series)
    for (const auto& p : s.points)
      csv << s.name << ',' << p.t << ',' << p.x << ',' << p.y << ',' << p.heading << ',' << p.speed << ','
          << p.yaw_rate << '\n';
  summary.heading_from_yaw_rate_error =
      std::abs(sim::wrap_angle(integrated_heading(ep.trajectory) - ep.trajectory.back().heading));
  return summary;
}

}  // namespace fusiondrive::bench
