#include "training/nadam.hpp"

#include <cmath>

namespace fusiondrive::train {

template <typename T>
Nadam<T>::Nadam(std::vector<nn::Param<T>*> params, NadamParams hp) : params_(std::move(params)), hp_(hp) {
  for (const auto* p : params_) {
    m_.emplace_back(p->value.size(), 0.0);
    v_.emplace_back(p->value.size(), 0.0);
  }
}

template <typename T>
void Nadam<T>::step(double lr) {
  ++t_;
  const double t = static_cast<double>(t_);
  const double mu = hp_.beta1 * (1.0 - 0.5 * std::pow(0.96, t * hp_.momentum_decay));
  const double mu_next = hp_.beta1 * (1.0 - 0.5 * std::pow(0.96, (t + 1.0) * hp_.momentum_decay));
  mu_product_ *= mu;
  const double c_grad = lr * (1.0 - mu) / (1.0 - mu_product_);
  const double c_mom = lr * mu_next / (1.0 - mu_product_ * mu_next);
  const double bias2 = 1.0 - std::pow(hp_.beta2, t);
  for (size_t k = 0; k < params_.size(); ++k) {
    auto& value = params_[k]->value.data;
    const auto& grad = params_[k]->grad.data;
    auto& m = m_[k];
    auto& v = v_[k];
    for (size_t i = 0; i < value.size(); ++i) {
      const double g = grad[i];
      m[i] = hp_.beta1 * m[i] + (1.0 - hp_.beta1) * g;
      v[i] = hp_.beta2 * v[i] + (1.0 - hp_.beta2) * g * g;
      const double denom = std::sqrt(v[i] / bias2) + hp_.epsilon;
      value[i] -= static_cast<T>((c_grad * g + c_mom * m[i]) / denom);
    }
  }
}

template class Nadam<float>;
template class Nadam<double>;

}  // namespace fusiondrive::train
