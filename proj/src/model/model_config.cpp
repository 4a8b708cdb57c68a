#include "model/model_config.hpp"

#include <numeric>

#include "common/error.hpp"

namespace fusiondrive::model {

int ModelConfig::latent_size() const {
  if (stage_widths.empty()) return stem_width;
  return bottleneck ? 4 * stage_widths.back() : stage_widths.back();
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfig, "model config: " + what); };
  if (input_channels != 3 && input_channels != 4) fail("input_channels must be 3 or 4");
  if (stage_widths.size() != 4 || stage_blocks.size() != 4) fail("encoder needs four stages");
  if (input_size <= 0 || input_size % 32 != 0) fail("input_size must be a positive multiple of 32");
  for (int b : stage_blocks)
    if (b < 1) fail("each stage needs at least one block");
  if (stem_width < 1) fail("stem_width must be positive");
  if (use_decoder) {
    if (decoder_filters.size() != decoder_strides.size() || decoder_filters.empty())
      fail("decoder filters and strides differ in length");
    if (decoder_filters.back() != n_classes) fail("last decoder layer must have n_classes filters");
    const int product = std::accumulate(decoder_strides.begin(), decoder_strides.end(), 1, std::multiplies<>());
    if (product * (input_size / 32) != input_size) fail("decoder strides must multiply to 32");
  }
  if (branch_hidden.empty()) fail("branch needs hidden layers");
  if (dropout < 0.0 || dropout >= 1.0) fail("dropout must be in [0, 1)");
}

ModelConfig desk_config() { return {}; }

ModelConfig resnet50_v2_config(int width_divisor) {
  const int d = width_divisor < 1 ? 1 : width_divisor;
  ModelConfig c;
  c.input_size = 224;
  c.stem_width = 64 / d;
  c.stage_widths = {64 / d, 128 / d, 256 / d, 512 / d};
  c.stage_blocks = {3, 4, 6, 3};
  c.bottleneck = true;
  c.decoder_filters = {512 / d, 128 / d, 64 / d, 16 / d, 5};
  c.branch_hidden = {256 / d, 256 / d};
  return c;
}

}  // namespace fusiondrive::model
