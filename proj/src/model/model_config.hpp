#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace fusiondrive::model {

struct ModelConfig {
  int input_size = 96;     // square, multiple of 32
  int input_channels = 4;  // 4 = RGBD, 3 = RGB only
  int stem_width = 16;
  std::vector<int> stage_widths{16, 24, 32, 64};
  std::vector<int> stage_blocks{1, 1, 1, 1};
  bool bottleneck = false;  // stage_widths are then the bottleneck (inner) widths
  bool use_decoder = true;
  std::vector<int> decoder_filters{48, 24, 16, 8, 5};
  std::vector<int> decoder_strides{4, 2, 2, 2, 1};
  int decoder_kernel = 3;
  std::vector<int> branch_hidden{64, 64};
  double dropout = 0.5;
  int n_classes = 5;
  unsigned long long init_seed = 1;

  /// Channel count of the encoder output.
  int latent_size() const;
  /// Throws Error(kConfig) when the stride or decoder contract is broken.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

/// The desk-scale default above.
ModelConfig desk_config();
/// ResNet-50-V2 stage layout (3, 4, 6, 3 bottlenecks) with the full decoder
/// (512, 128, 64, 16, 5) and (256, 256) branches; widths divided by `width_divisor`.
ModelConfig resnet50_v2_config(int width_divisor = 1);

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ModelConfig, input_size, input_channels, stem_width,
                                                stage_widths, stage_blocks, bottleneck, use_decoder,
                                                decoder_filters, decoder_strides, decoder_kernel,
                                                branch_hidden, dropout, n_classes, init_seed)

}  // namespace fusiondrive::model
