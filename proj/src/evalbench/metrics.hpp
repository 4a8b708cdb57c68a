#pragma once

#include <span>
#include <utility>
#include <vector>

#include "evalbench/episode.hpp"

namespace fusiondrive::bench {

/// 100 x successes / N. Throws Error(kEmptyInput) for no results.
double success_rate(std::span<const EpisodeResult> results);

/// Position at normalized time u in [0, 1] of the trajectory's duration,
/// linearly interpolated.
std::pair<double, double> position_at_fraction(std::span<const TrajectoryPoint> traj, double u);

/// Root mean squared distance between the two paths, both resampled at T
/// equally spaced fractions of their own duration; T is the expert's sample
/// count. Throws Error(kEmptyInput) for an empty trajectory.
double episode_rmse(std::span<const TrajectoryPoint> agent, std::span<const TrajectoryPoint> expert);

/// Mean over paired episodes of episode_rmse, counting only pairs whose agent
/// and expert runs both succeeded. Throws Error(kNoSuccessfulEpisodes) when no
/// pair qualifies and Error(kShapeMismatch) when the lists differ in length.
double trajectory_rmse(std::span<const EpisodeResult> agent, std::span<const EpisodeResult> expert);

/// Number of pairs trajectory_rmse averages over.
int successful_pairs(std::span<const EpisodeResult> agent, std::span<const EpisodeResult> expert);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation

  bool operator==(const MeanStd&) const = default;
};
MeanStd mean_std(std::span<const double> values);

}  // namespace fusiondrive::bench
