#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "common/commands.hpp"
#include "model/model_config.hpp"
#include "nn/layers.hpp"

namespace fusiondrive::model {

using nn::Tensor;

template <typename T>
struct LatentFeatures {
  Tensor<T> feature_map;  // (N, C, S/32, S/32)
  Tensor<T> latent;       // (N, C) spatial mean of feature_map
};

template <typename T>
struct NetOutput {
  Tensor<T> semantics;  // (N, n_classes, S, S) probabilities; empty without decoder
  Tensor<T> controls;   // (N, 2): steer in [-1, 1], speed in [0, 1]
};

/// RGBD encoder, scene decoder and one policy branch per navigation command.
template <typename T>
class DrivingNet {
 public:
  explicit DrivingNet(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  bool has_decoder() const { return decoder_ != nullptr; }

  /// Throws Error(kShapeMismatch) for inputs that do not match the config.
  LatentFeatures<T> encode(const Tensor<T>& x, bool training);
  /// Throws Error(kConfig) when the model has no decoder.
  Tensor<T> decode(const Tensor<T>& feature_map, bool training);
  /// Runs only the branch selected by each sample's command. Throws
  /// Error(kUnknownCommand) for values outside the four commands.
  Tensor<T> policy(const Tensor<T>& latent, std::span<const NavCommand> commands, bool training);
  /// One shared encoder pass feeding the decoder and the policy.
  NetOutput<T> forward(const Tensor<T>& x, std::span<const NavCommand> commands, bool training);

  /// Backpropagates the last forward(); d_semantics may be null.
  void backward(const Tensor<T>* d_semantics, const Tensor<T>& d_controls);

  std::vector<nn::Param<T>*> parameters();
  std::vector<nn::Buffer<T>> buffers();
  std::vector<nn::Param<T>*> branch_parameters(int branch);
  std::vector<nn::Param<T>*> decoder_parameters();
  void zero_grad();
  size_t parameter_count();
  std::string summary();
  void reseed_dropout(uint64_t seed);

 private:
  ModelConfig config_;
  nn::Sequential<T> encoder_;
  nn::GlobalAvgPool<T> pool_;
  std::unique_ptr<nn::Sequential<T>> decoder_;
  std::array<nn::Sequential<T>, kNumNavCommands> branches_;
  std::array<std::vector<nn::Dropout<T>*>, kNumNavCommands> dropouts_;

  // Cached by forward for backward.
  std::array<std::vector<int>, kNumNavCommands> groups_;
  Tensor<T> controls_;
  int batch_ = 0;
  int latent_channels_ = 0;
  bool forward_had_decoder_ = false;
};

extern template class DrivingNet<float>;
extern template class DrivingNet<double>;

}  // namespace fusiondrive::model
