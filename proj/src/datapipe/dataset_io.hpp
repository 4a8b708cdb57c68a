#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "datapipe/sample.hpp"

namespace fusiondrive::data {

/// One line of an episode's records.jsonl.
struct FrameRecord {
  int frame = 0;
  double timestamp = 0.0;
  double steer = 0.0;
  double speed = 0.0;
  double measured_speed = 0.0;
  NavCommand command = NavCommand::kLaneFollow;
  bool noise = false;
  sim::Pose pose;

  bool operator==(const FrameRecord&) const = default;
};

struct EpisodeInfo {
  std::string name;
  sim::TownId town = sim::TownId::kTrain;
  std::string weather;
  uint64_t seed = 0;
  size_t frames = 0;
  size_t flagged = 0;
  std::string end;
  double route_length = 0.0;

  bool operator==(const EpisodeInfo&) const = default;
};

struct Manifest {
  std::vector<EpisodeInfo> episodes;
  int image_width = 0;
  int image_height = 0;
  double dt = 0.1;
};

std::string episode_dir_name(int index);

/// Streams frames of one episode to disk: rgb_%05d.png (8-bit), depth_%05d.png
/// (16-bit), semantic_%05d.png and one JSON record per line.
class EpisodeWriter {
 public:
  explicit EpisodeWriter(std::filesystem::path dir);

  void add(const Sample& sample);
  size_t frames() const { return frames_; }
  size_t flagged() const { return flagged_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  size_t frames_ = 0;
  size_t flagged_ = 0;
};

std::vector<FrameRecord> read_records(const std::filesystem::path& episode_dir);
Sample load_sample(const std::filesystem::path& episode_dir, const FrameRecord& record);

void write_manifest(const std::filesystem::path& dataset_dir, const Manifest& manifest);
/// Throws Error(kMissingArtifact) when the manifest is absent.
Manifest read_manifest(const std::filesystem::path& dataset_dir);

/// All frames of the dataset's episodes recorded in `town`, full resolution.
Dataset load_dataset(const std::filesystem::path& dataset_dir, sim::TownId town);

}  // namespace fusiondrive::data
