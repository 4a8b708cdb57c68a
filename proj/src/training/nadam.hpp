#pragma once

#include <vector>

#include "nn/tensor.hpp"

namespace fusiondrive::train {

struct NadamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
  double momentum_decay = 4e-3;
};

/// Adam with Nesterov momentum and the 0.96^(t * decay) momentum schedule.
template <typename T>
class Nadam {
 public:
  Nadam(std::vector<nn::Param<T>*> params, NadamParams hp = {});

  void step(double lr);
  long steps() const { return t_; }

 private:
  std::vector<nn::Param<T>*> params_;
  NadamParams hp_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  long t_ = 0;
  double mu_product_ = 1.0;
};

extern template class Nadam<float>;
extern template class Nadam<double>;

}  // namespace fusiondrive::train
