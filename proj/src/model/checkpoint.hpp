#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include <json.hpp>

#include "model/driving_net.hpp"

namespace fusiondrive::model {

struct CheckpointMeta {
  int epoch = 0;
  double validation_loss = 0.0;
  std::string variant = "MSFSU";
  unsigned long long seed = 0;
  nlohmann::json extra = nlohmann::json::object();
};

/// Binary layout: "FDCKPT01", u64 header length, JSON header (config, meta,
/// tensor names and shapes), then the float32 tensors in header order.
void save_checkpoint(const std::filesystem::path& path, DrivingNet<float>& net, const CheckpointMeta& meta);

struct LoadedCheckpoint {
  std::unique_ptr<DrivingNet<float>> net;
  CheckpointMeta meta;
};

/// Throws Error(kMissingArtifact) when the file is absent and Error(kIo) when
/// it is malformed or does not match its own config.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

/// Copies parameter values and buffers between nets of the same config.
void copy_weights(DrivingNet<float>& from, DrivingNet<float>& to);

}  // namespace fusiondrive::model
