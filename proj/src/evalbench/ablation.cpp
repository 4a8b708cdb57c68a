#include "evalbench/ablation.hpp"

#include <string>

#include "common/error.hpp"

namespace fusiondrive::bench {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kMSFSU: return "MSFSU";
    case Variant::kMSF: return "MSF";
    case Variant::kSU: return "SU";
  }
  return "MSFSU";
}

Variant variant_from_string(std::string_view s) {
  for (Variant v : kAllVariants)
    if (to_string(v) == s) return v;
  throw Error(ErrorCode::kUnknownVariant, "unknown variant '" + std::string(s) + "' (expected MSFSU, MSF or SU)");
}

AblationSetup make_ablation(Variant variant, const model::ModelConfig& model, const train::TrainConfig& train,
                            const train::LossWeights& weights) {
  AblationSetup s{variant, model, train, weights};
  switch (variant) {
    case Variant::kMSFSU:
      break;
    case Variant::kMSF:
      s.model.use_decoder = false;
      s.model.input_channels = 4;
      s.weights.lambda3 = 0.0;
      break;
    case Variant::kSU:
      s.model.use_decoder = true;
      s.model.input_channels = 3;
      break;
  }
  return s;
}

AblationSetup make_ablation(std::string_view variant, const model::ModelConfig& model,
                            const train::TrainConfig& train, const train::LossWeights& weights) {
  return make_ablation(variant_from_string(variant), model, train, weights);
}

}  // namespace fusiondrive::bench
