#include "training/losses.hpp"

#include <cmath>

#include "common/error.hpp"

namespace fusiondrive::train {
namespace {

template <typename T>
void check_pair(std::span<const T> pred, std::span<const T> gt, std::span<T> grad) {
  if (pred.empty()) throw Error(ErrorCode::kEmptyInput, "loss over an empty batch");
  if (pred.size() != gt.size() || (!grad.empty() && grad.size() != pred.size()))
    throw Error(ErrorCode::kShapeMismatch, "prediction and target sizes differ");
}

}  // namespace

template <typename T>
T steering_loss(std::span<const T> pred, std::span<const T> gt, const LossWeights& w, std::span<T> grad) {
  check_pair(pred, gt, grad);
  const T inv_n = T(1) / static_cast<T>(pred.size());
  T sum = 0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const T weight = std::pow(T(1) + T(w.alpha) * std::pow(std::abs(gt[i]), T(w.beta)), T(w.gamma));
    const T r = pred[i] - gt[i];
    sum += weight * r * r;
    if (!grad.empty()) grad[i] = T(2) * weight * r * inv_n;
  }
  return sum * inv_n;
}

template <typename T>
T speed_loss(std::span<const T> pred, std::span<const T> gt, std::span<T> grad) {
  check_pair(pred, gt, grad);
  const T inv_n = T(1) / static_cast<T>(pred.size());
  T sum = 0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const T r = pred[i] - gt[i];
    sum += r * r;
    if (!grad.empty()) grad[i] = T(2) * r * inv_n;
  }
  return sum * inv_n;
}

template <typename T>
T scene_loss(const nn::Tensor<T>& probs, std::span<const uint8_t> labels, nn::Tensor<T>* grad) {
  if (probs.empty()) throw Error(ErrorCode::kEmptyInput, "scene loss over an empty batch");
  const size_t pixels = static_cast<size_t>(probs.plane());
  if (labels.size() != static_cast<size_t>(probs.n) * pixels)
    throw Error(ErrorCode::kShapeMismatch, "label raster does not match " + probs.shape_string());
  const T scale = T(1) / (static_cast<T>(probs.n) * static_cast<T>(pixels) * static_cast<T>(probs.c));
  const T floor = static_cast<T>(kProbabilityFloor);
  if (grad) *grad = nn::Tensor<T>(probs.n, probs.c, probs.h, probs.w);
  T sum = 0;
  for (int i = 0; i < probs.n; ++i) {
    const T* img = probs.image(i);
    const uint8_t* lbl = labels.data() + static_cast<size_t>(i) * pixels;
    for (size_t j = 0; j < pixels; ++j) {
      const int k = lbl[j];
      if (k >= probs.c) throw Error(ErrorCode::kInvalidArgument, "label outside the class range");
      const T p = img[static_cast<size_t>(k) * pixels + j];
      if (p > floor) {
        sum -= std::log(p);
        if (grad) grad->image(i)[static_cast<size_t>(k) * pixels + j] = -scale / p;
      } else {
        sum -= std::log(floor);
      }
    }
  }
  return sum * scale;
}

double total_loss(double steer, double speed, double scene, const LossWeights& w) {
  return w.lambda1 * steer + w.lambda2 * speed + w.lambda3 * scene;
}

template float steering_loss(std::span<const float>, std::span<const float>, const LossWeights&, std::span<float>);
template double steering_loss(std::span<const double>, std::span<const double>, const LossWeights&, std::span<double>);
template float speed_loss(std::span<const float>, std::span<const float>, std::span<float>);
template double speed_loss(std::span<const double>, std::span<const double>, std::span<double>);
template float scene_loss(const nn::Tensor<float>&, std::span<const uint8_t>, nn::Tensor<float>*);
template double scene_loss(const nn::Tensor<double>&, std::span<const uint8_t>, nn::Tensor<double>*);

}  // namespace fusiondrive::train
