#include "training/objective.hpp"

#include "common/error.hpp"

namespace fusiondrive::train {

template <typename T>
LossBreakdown batch_objective(model::DrivingNet<T>& net, const nn::Tensor<T>& x, const BatchTargets<T>& targets,
                              const LossWeights& weights, bool training, bool backward) {
  const auto out = net.forward(x, targets.commands, training);
  const int n = x.n;
  if (static_cast<int>(targets.steer.size()) != n || static_cast<int>(targets.speed.size()) != n)
    throw Error(ErrorCode::kShapeMismatch, "targets do not match the batch");
  std::vector<T> steer(n), speed(n), d_steer(n), d_speed(n);
  for (int i = 0; i < n; ++i) {
    steer[i] = out.controls.at(i, 0);
    speed[i] = out.controls.at(i, 1);
  }
  LossBreakdown l;
  l.steer = steering_loss<T>(steer, targets.steer, weights, d_steer);
  l.speed = speed_loss<T>(speed, targets.speed, d_speed);
  const bool scene = net.has_decoder() && weights.lambda3 != 0.0;
  nn::Tensor<T> d_sem;
  if (scene) l.scene = scene_loss<T>(out.semantics, targets.labels, backward ? &d_sem : nullptr);
  l.total = total_loss(l.steer, l.speed, l.scene, weights);
  if (backward) {
    nn::Tensor<T> d_controls(n, 2);
    for (int i = 0; i < n; ++i) {
      d_controls.at(i, 0) = static_cast<T>(weights.lambda1) * d_steer[i];
      d_controls.at(i, 1) = static_cast<T>(weights.lambda2) * d_speed[i];
    }
    if (scene)
      for (auto& g : d_sem.data) g *= static_cast<T>(weights.lambda3);
    net.backward(scene ? &d_sem : nullptr, d_controls);
  }
  return l;
}

template LossBreakdown batch_objective(model::DrivingNet<float>&, const nn::Tensor<float>&,
                                       const BatchTargets<float>&, const LossWeights&, bool, bool);
template LossBreakdown batch_objective(model::DrivingNet<double>&, const nn::Tensor<double>&,
                                       const BatchTargets<double>&, const LossWeights&, bool, bool);

}  // namespace fusiondrive::train
