#include "evalbench/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace fusiondrive::bench {

double success_rate(std::span<const EpisodeResult> results) {
  if (results.empty()) throw Error(ErrorCode::kEmptyInput, "success rate of no episodes");
  const auto n = std::count_if(results.begin(), results.end(), [](const EpisodeResult& r) { return r.success; });
  return 100.0 * static_cast<double>(n) / static_cast<double>(results.size());
}

std::pair<double, double> position_at_fraction(std::span<const TrajectoryPoint> traj, double u) {
  if (traj.empty()) throw Error(ErrorCode::kEmptyInput, "empty trajectory");
  if (traj.size() == 1) return {traj[0].x, traj[0].y};
  const double t0 = traj.front().t;
  const double t = t0 + std::clamp(u, 0.0, 1.0) * (traj.back().t - t0);
  auto it = std::upper_bound(traj.begin(), traj.end(), t, [](double v, const TrajectoryPoint& p) { return v < p.t; });
  if (it == traj.begin()) return {traj.front().x, traj.front().y};
  if (it == traj.end()) return {traj.back().x, traj.back().y};
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double w = (t - a.t) / (b.t - a.t);
  return {a.x + w * (b.x - a.x), a.y + w * (b.y - a.y)};
}

double episode_rmse(std::span<const TrajectoryPoint> agent, std::span<const TrajectoryPoint> expert) {
  if (agent.empty() || expert.empty()) throw Error(ErrorCode::kEmptyInput, "empty trajectory");
  const size_t T = expert.size();
  double sum = 0.0;
  for (size_t k = 0; k < T; ++k) {
    const double u = T == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(T - 1);
    const auto [ax, ay] = position_at_fraction(agent, u);
    const auto [ex, ey] = position_at_fraction(expert, u);
    sum += (ax - ex) * (ax - ex) + (ay - ey) * (ay - ey);
  }
  return std::sqrt(sum / static_cast<double>(T));
}

int successful_pairs(std::span<const EpisodeResult> agent, std::span<const EpisodeResult> expert) {
  if (agent.size() != expert.size()) throw Error(ErrorCode::kShapeMismatch, "agent and expert episode counts differ");
  int n = 0;
  for (size_t i = 0; i < agent.size(); ++i) n += agent[i].success && expert[i].success;
  return n;
}

double trajectory_rmse(std::span<const EpisodeResult> agent, std::span<const EpisodeResult> expert) {
  const int n = successful_pairs(agent, expert);
  if (n == 0) throw Error(ErrorCode::kNoSuccessfulEpisodes, "no successful episodes to compare");
  double sum = 0.0;
  for (size_t i = 0; i < agent.size(); ++i)
    if (agent[i].success && expert[i].success) sum += episode_rmse(agent[i].trajectory, expert[i].trajectory);
  return sum / n;
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "mean of no values");
  MeanStd m;
  for (double v : values) m.mean += v;
  m.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - m.mean) * (v - m.mean);
  m.std = std::sqrt(var / static_cast<double>(values.size()));
  return m;
}

}  // namespace fusiondrive::bench
