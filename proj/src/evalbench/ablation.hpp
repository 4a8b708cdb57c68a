#pragma once

#include <array>
#include <string_view>

#include "model/model_config.hpp"
#include "training/losses.hpp"
#include "training/trainer.hpp"

namespace fusiondrive::bench {

/// MSFSU: RGBD input with the scene decoder. MSF: RGBD without the decoder.
/// SU: RGB input with the decoder.
enum class Variant { kMSFSU, kMSF, kSU };
inline constexpr std::array<Variant, 3> kAllVariants = {Variant::kMSFSU, Variant::kMSF, Variant::kSU};

std::string_view to_string(Variant v);
/// Throws Error(kUnknownVariant).
Variant variant_from_string(std::string_view s);

struct AblationSetup {
  Variant variant = Variant::kMSFSU;
  model::ModelConfig model;
  train::TrainConfig train;
  train::LossWeights weights;
};

AblationSetup make_ablation(Variant variant, const model::ModelConfig& model, const train::TrainConfig& train,
                            const train::LossWeights& weights);
AblationSetup make_ablation(std::string_view variant, const model::ModelConfig& model,
                            const train::TrainConfig& train, const train::LossWeights& weights);

}  // namespace fusiondrive::bench
