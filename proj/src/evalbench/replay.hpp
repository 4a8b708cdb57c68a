#pragma once

#include <filesystem>
#include <string>

#include "evalbench/archive.hpp"
#include "evalbench/episode.hpp"

namespace fusiondrive::bench {

struct ReplayOptions {
  bool frames = true;
  int frame_stride = 1;
  int max_frames = -1;  // -1 = all
};

struct ReplaySummary {
  size_t frames_written = 0;
  size_t ticks = 0;
  /// Largest position difference between the re-simulation and the archive.
  double max_deviation = 0.0;
  double heading_from_yaw_rate_error = 0.0;
};

/// Rebuilds the archived episode by re-simulating its scenario with the logged
/// actuation and writes frame_%05d_{rgb,depth,semantic}.png, trajectory.png,
/// yaw_rate.png and trajectory.csv to out_dir. The matching expert run, when
/// archived, is drawn alongside.
ReplaySummary replay_episode(const Archive& archive, size_t episode, const EpisodeRules& rules,
                             const std::filesystem::path& out_dir, const ReplayOptions& options = {});

/// Heading at the end of the trajectory obtained by integrating yaw rates,
/// wrapped to (-pi, pi].
double integrated_heading(std::span<const TrajectoryPoint> trajectory);

/// Index of the archived episode for (task, route, repetition, weather).
/// Throws Error(kMissingArtifact) when absent.
size_t find_episode(const Archive& archive, const std::string& task, int route, int repetition,
                    const std::string& weather = "");

}  // namespace fusiondrive::bench
