#include "training/train_set.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "datapipe/preprocess.hpp"

namespace fusiondrive::train {

uint32_t TrainSet::add_frame(const data::Sample& sample, double v_max) {
  const ImageF x = data::preprocess(sample.rgb, sample.depth, size, true);
  const LabelImage lbl = data::preprocess_labels(sample.semantic, size);
  const size_t pixels = static_cast<size_t>(size) * size;
  for (size_t p = 0; p < pixels; ++p) {
    for (int c = 0; c < 3; ++c)
      rgb.push_back(static_cast<uint8_t>(std::lround(std::clamp(x.data[p * 4 + c], 0.0f, 1.0f) * 255.0f)));
    depth.push_back(static_cast<uint16_t>(std::lround(std::clamp(x.data[p * 4 + 3], 0.0f, 1.0f) * 65535.0f)));
  }
  labels.insert(labels.end(), lbl.data.begin(), lbl.data.end());
  command.push_back(sample.nav_command);
  steer.push_back(static_cast<float>(std::clamp(sample.steer_gt, -1.0, 1.0)));
  speed.push_back(static_cast<float>(std::clamp(sample.speed_gt / v_max, 0.0, 1.0)));
  return static_cast<uint32_t>(command.size() - 1);
}

TrainSet make_train_set(std::span<const data::Sample> samples, int input_size, double v_max) {
  TrainSet set(input_size);
  for (const auto& s : samples) set.add(s, v_max);
  return set;
}

Batch make_batch(const TrainSet& set, std::span<const uint32_t> entries, int channels,
                 const data::AugmentParams* augment, uint64_t seed) {
  if (channels != 3 && channels != 4) throw Error(ErrorCode::kInvalidArgument, "batch channels must be 3 or 4");
  const int s = set.size;
  const size_t pixels = static_cast<size_t>(s) * s;
  const int n = static_cast<int>(entries.size());
  Batch b;
  b.x = nn::Tensor<float>(n, channels, s, s);
  b.labels.resize(static_cast<size_t>(n) * pixels);
  ImageF hwc(s, s, channels);
  for (int i = 0; i < n; ++i) {
    const uint32_t f = set.order.at(entries[i]);
    const uint8_t* rgb = set.rgb.data() + f * pixels * 3;
    const uint16_t* dep = set.depth.data() + f * pixels;
    for (size_t p = 0; p < pixels; ++p) {
      for (int c = 0; c < 3; ++c) hwc.data[p * channels + c] = rgb[p * 3 + c] * (1.0f / 255.0f);
      if (channels == 4) hwc.data[p * 4 + 3] = dep[p] * (1.0f / 65535.0f);
    }
    const ImageF& src = augment ? data::augment(hwc, mix_seed(seed, entries[i]), *augment) : hwc;
    float* dst = b.x.image(i);
    for (int c = 0; c < channels; ++c)
      for (size_t p = 0; p < pixels; ++p) dst[c * pixels + p] = src.data[p * channels + c];
    std::copy_n(set.labels.data() + f * pixels, pixels, b.labels.data() + static_cast<size_t>(i) * pixels);
    b.commands.push_back(set.command[f]);
    b.steer.push_back(set.steer[f]);
    b.speed.push_back(set.speed[f]);
  }
  return b;
}

nn::Tensor<float> observation_input(const ImageF& rgb, const ImageF& depth, int size, int channels) {
  TrainSet one(size);
  data::Sample s;
  s.rgb = rgb;
  s.depth = depth;
  s.semantic = LabelImage(rgb.width, rgb.height, 1);
  one.add(s, 1.0);
  const uint32_t entry = 0;
  return make_batch(one, std::span(&entry, 1), channels).x;
}

}  // namespace fusiondrive::train
