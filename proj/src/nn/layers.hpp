#pragma once

#include <memory>
#include <string>
#include <vector>

#include "common/rng.hpp"
#include "nn/tensor.hpp"

namespace fusiondrive::nn {

template <typename T>
class Module {
 public:
  virtual ~Module() = default;
  virtual Tensor<T> forward(const Tensor<T>& x, bool training) = 0;
  /// Gradient w.r.t. the last forward input; parameter gradients accumulate.
  virtual Tensor<T> backward(const Tensor<T>& dy) = 0;
  virtual void collect(std::vector<Param<T>*>& params, std::vector<Buffer<T>>& buffers) {}
  virtual std::string describe() const = 0;
};

/// Patch gather between a large image and a small grid: small position
/// (iy, ix) with kernel offset (ky, kx) reads large pixel
/// (iy * stride + ky - pad, ix * stride + kx - pad); outside pixels are zero.
struct PatchGeometry {
  int channels, large_h, large_w, small_h, small_w, kernel, stride, pad;
};

template <typename T>
void gather_patches(const T* image, const PatchGeometry& g, T* cols);
/// Adjoint of gather_patches: accumulates into image.
template <typename T>
void scatter_patches(const T* cols, const PatchGeometry& g, T* image);

template <typename T>
class Conv2d : public Module<T> {
 public:
  Conv2d(std::string name, int in, int out, int kernel, int stride, int pad, bool bias, Rng& rng);
  Tensor<T> forward(const Tensor<T>& x, bool training) override;
  Tensor<T> backward(const Tensor<T>& dy) override;
  void collect(std::vector<Param<T>*>& params, std::vector<Buffer<T>>& buffers) override;
  std::string describe() const override;
  static int output_size(int in, int kernel, int stride, int pad) { return (in + 2 * pad - kernel) / stride + 1; }

 private:
  PatchGeometry geometry(int h, int w) const;
  int in_, out_, k_, s_, p_;
  bool has_bias_;
  Param<T> weight_;  // out x (in * k * k)
  Param<T> bias_;
  Tensor<T> input_;
};

/// Transposed convolution producing an output `stride` times larger than the
/// input; pad = max(kernel - stride, 0) / 2 before, extra rows cropped.
template <typename T>
class ConvTranspose2d : public Module<T> {
 public:
  ConvTranspose2d(std::string name, int in, int out, int kernel, int stride, Rng& rng);
  Tensor<T> forward(const Tensor<T>& x, bool training) override;
  Tensor<T> backward(const Tensor<T>& dy) override;
  void collect(std::vector<Param<T>*>& params, std::vector<Buffer<T>>& buffers) override;
  std::string describe() const override;
  Param<T>& weight() { return weight_; }
  Param<T>& bias() { return bias_; }

 private:
  PatchGeometry geometry(int h, int w) const;
  int in_, out_, k_, s_, p_;
  Param<T> weight_;  // in x (out * k * k)
  Param<T> bias_;
  Tensor<T> input_;
};

template <typename T>
class BatchNorm2d : public Module<T> {
 public:
  BatchNorm2d(std::string name, int channels, double momentum = 0.1, double eps = 1e-5);
  Tensor<T> forward(const Tensor<T>& x, bool training) override;
  Tensor<T> backward(const Tensor<T>& dy) override;
  void collect(std::vector<Param<T>*>& params, std::vector<Buffer<T>>& buffers) override;
  std::string describe() const override;

 private:
  std::string name_;
  int c_;
  double momentum_, eps_;
  Param<T> gamma_, beta_;
  Tensor<T> running_mean_, running_var_;
  Tensor<T> xhat_;
  std::vector<T> inv_std_;
  bool last_training_ = true;
};

template <typename T>
class ReLU : public Module<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x, bool training) override;
  Tensor<T> backward(const Tensor<T>& dy) override;
  std::string describe() const override { return "ReLU"; }

 private:
  Tensor<T> output_;
};

/// Inverted dropout; identity at inference.
template <typename T>
class Dropout : public Module<T> {
 public:
  explicit Dropout(double p) : p_(p) {}
  Tensor<T> forward(const Tensor<T>& x, bool training) override;
  Tensor<T> backward(const Tensor<T>& dy) override;
  std::string describe() const override { return "Dropout(" + std::to_string(p_) + ")"; }
  void reseed(uint64_t seed) { rng_ = Rng(seed); }

 private:
  double p_;
  Rng rng_{0};
  std::vector<T> mask_;
};

template <typename T>
class Linear : public Module<T> {
 public:
  Linear(std::string name, int in, int out, Rng& rng);
  Tensor<T> forward(const Tensor<T>& x, bool training) override;
  Tensor<T> backward(const Tensor<T>& dy) override;
  void collect(std::vector<Param<T>*>& params, std::vector<Buffer<T>>& buffers) override;
  std::string describe() const override;

 private:
  int in_, out_;
  Param<T> weight_;  // out x in
  Param<T> bias_;
  Tensor<T> input_;
};

template <typename T>
class GlobalAvgPool : public Module<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x, bool training) override;
  Tensor<T> backward(const Tensor<T>& dy) override;
  std::string describe() const override { return "GlobalAvgPool"; }

 private:
  int h_ = 1, w_ = 1;
};

/// Softmax over channels at every pixel.
template <typename T>
class ChannelSoftmax : public Module<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x, bool training) override;
  Tensor<T> backward(const Tensor<T>& dy) override;
  std::string describe() const override { return "Softmax"; }

 private:
  Tensor<T> output_;
};

template <typename T>
class Sequential : public Module<T> {
 public:
  template <typename M, typename... Args>
  M& add(Args&&... args) {
    auto m = std::make_unique<M>(std::forward<Args>(args)...);
    M& ref = *m;
    layers_.push_back(std::move(m));
    return ref;
  }
  Tensor<T> forward(const Tensor<T>& x, bool training) override;
  Tensor<T> backward(const Tensor<T>& dy) override;
  void collect(std::vector<Param<T>*>& params, std::vector<Buffer<T>>& buffers) override;
  std::string describe() const override;
  const std::vector<std::unique_ptr<Module<T>>>& layers() const { return layers_; }

 private:
  std::vector<std::unique_ptr<Module<T>>> layers_;
};

/// Pre-activation residual block: BN-ReLU-conv3x3(stride)-BN-ReLU-conv3x3,
/// projection shortcut on the activated input when the shape changes.
template <typename T>
class PreActBlock : public Module<T> {
 public:
  PreActBlock(const std::string& name, int in, int out, int stride, Rng& rng);
  Tensor<T> forward(const Tensor<T>& x, bool training) override;
  Tensor<T> backward(const Tensor<T>& dy) override;
  void collect(std::vector<Param<T>*>& params, std::vector<Buffer<T>>& buffers) override;
  std::string describe() const override;

 private:
  BatchNorm2d<T> bn1_;
  ReLU<T> relu1_;
  Conv2d<T> conv1_;
  BatchNorm2d<T> bn2_;
  ReLU<T> relu2_;
  Conv2d<T> conv2_;
  std::unique_ptr<Conv2d<T>> shortcut_;
};

/// Pre-activation bottleneck: 1x1 reduce, 3x3 (stride), 1x1 expand.
template <typename T>
class PreActBottleneck : public Module<T> {
 public:
  PreActBottleneck(const std::string& name, int in, int mid, int out, int stride, Rng& rng);
  Tensor<T> forward(const Tensor<T>& x, bool training) override;
  Tensor<T> backward(const Tensor<T>& dy) override;
  void collect(std::vector<Param<T>*>& params, std::vector<Buffer<T>>& buffers) override;
  std::string describe() const override;

 private:
  BatchNorm2d<T> bn1_;
  ReLU<T> relu1_;
  Conv2d<T> conv1_;
  BatchNorm2d<T> bn2_;
  ReLU<T> relu2_;
  Conv2d<T> conv2_;
  BatchNorm2d<T> bn3_;
  ReLU<T> relu3_;
  Conv2d<T> conv3_;
  std::unique_ptr<Conv2d<T>> shortcut_;
};

}  // namespace fusiondrive::nn
