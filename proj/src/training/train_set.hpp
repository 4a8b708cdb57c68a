#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "common/commands.hpp"
#include "datapipe/augment.hpp"
#include "datapipe/sample.hpp"
#include "nn/tensor.hpp"

namespace fusiondrive::train {

/// Preprocessed frames held compactly (8-bit colour, 16-bit depth) plus the
/// sample order, where balancing duplicates point at the same frame.
struct TrainSet {
  int size = 0;
  std::vector<uint8_t> rgb;     // frames x size x size x 3
  std::vector<uint16_t> depth;  // frames x size x size
  std::vector<uint8_t> labels;  // frames x size x size
  std::vector<NavCommand> command;
  std::vector<float> steer;     // normalized [-1, 1]
  std::vector<float> speed;     // normalized by v_max
  std::vector<uint32_t> order;  // entries into the frames above

  explicit TrainSet(int input_size = 96) : size(input_size) {}

  size_t frames() const { return command.size(); }
  size_t count() const { return order.size(); }
  bool empty() const { return order.empty(); }

  /// Preprocesses the sample and stores it as a new frame without adding it to
  /// the order. Returns the frame index.
  uint32_t add_frame(const data::Sample& sample, double v_max);
  /// add_frame plus one entry in the order.
  void add(const data::Sample& sample, double v_max) { order.push_back(add_frame(sample, v_max)); }
};

TrainSet make_train_set(std::span<const data::Sample> samples, int input_size, double v_max);

struct Batch {
  nn::Tensor<float> x;          // (n, channels, size, size)
  std::vector<uint8_t> labels;  // n x size x size
  std::vector<NavCommand> commands;
  std::vector<float> steer;
  std::vector<float> speed;
};

/// Gathers order entries into a network batch. With `augment` set, each
/// sample's colour channels are augmented from mix_seed(seed, entry position).
Batch make_batch(const TrainSet& set, std::span<const uint32_t> entries, int channels,
                 const data::AugmentParams* augment = nullptr, uint64_t seed = 0);

/// Network input for one camera frame, quantized exactly like stored frames.
nn::Tensor<float> observation_input(const ImageF& rgb, const ImageF& depth, int size, int channels);

}  // namespace fusiondrive::train
