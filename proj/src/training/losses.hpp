#pragma once

#include <cstdint>
#include <span>

#include <json.hpp>

#include "nn/tensor.hpp"

namespace fusiondrive::train {

struct LossWeights {
  double lambda1 = 10.0;  // steer
  double lambda2 = 1.0;   // speed
  double lambda3 = 2.0;   // scene
  double alpha = 5.0;
  double beta = 1.0;
  double gamma = 2.0;

  bool operator==(const LossWeights&) const = default;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LossWeights, lambda1, lambda2, lambda3, alpha, beta, gamma)

inline constexpr double kProbabilityFloor = 1e-8;

/// mean_i (1 + alpha |gt_i|^beta)^gamma (pred_i - gt_i)^2. Writes d loss / d pred
/// into grad when given. Throws Error(kEmptyInput) for an empty batch.
template <typename T>
T steering_loss(std::span<const T> pred, std::span<const T> gt, const LossWeights& w,
                std::span<T> grad = {});

/// Mean squared error with optional gradient.
template <typename T>
T speed_loss(std::span<const T> pred, std::span<const T> gt, std::span<T> grad = {});

/// -(1/L)(1/Np)(1/Nc) sum of one-hot(gt) * log(max(p, floor)) over a (L, Nc, H, W)
/// probability batch and (L, H, W) labels.
template <typename T>
T scene_loss(const nn::Tensor<T>& probs, std::span<const uint8_t> labels, nn::Tensor<T>* grad = nullptr);

/// lambda1 steer + lambda2 speed + lambda3 scene.
double total_loss(double steer, double speed, double scene, const LossWeights& w);

}  // namespace fusiondrive::train
