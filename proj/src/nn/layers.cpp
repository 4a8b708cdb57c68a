#include "nn/layers.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

#include "common/error.hpp"

namespace fusiondrive::nn {
namespace {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapM = Eigen::Map<Mat<T>>;
template <typename T>
using CMapM = Eigen::Map<const Mat<T>>;

template <typename T>
void he_init(Tensor<T>& t, double fan_in, Rng& rng) {
  const double std = std::sqrt(2.0 / fan_in);
  for (T& v : t.data) v = static_cast<T>(rng.normal(0.0, std));
}

template <typename T>
Param<T> make_param(std::string name, int n, int c, int h = 1, int w = 1) {
  return {std::move(name), Tensor<T>(n, c, h, w), Tensor<T>(n, c, h, w)};
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kShapeMismatch, what);
}

}  // namespace

template <typename T>
void gather_patches(const T* image, const PatchGeometry& g, T* cols) {
  const int cells = g.small_h * g.small_w;
  for (int c = 0; c < g.channels; ++c) {
    const T* plane = image + static_cast<size_t>(c) * g.large_h * g.large_w;
    for (int ky = 0; ky < g.kernel; ++ky) {
      for (int kx = 0; kx < g.kernel; ++kx) {
        T* row = cols + (static_cast<size_t>(c) * g.kernel * g.kernel + ky * g.kernel + kx) * cells;
        for (int iy = 0; iy < g.small_h; ++iy) {
          const int y = iy * g.stride + ky - g.pad;
          T* out = row + iy * g.small_w;
          if (y < 0 || y >= g.large_h) {
            std::fill(out, out + g.small_w, T(0));
            continue;
          }
          const T* src = plane + static_cast<size_t>(y) * g.large_w;
          for (int ix = 0; ix < g.small_w; ++ix) {
            const int x = ix * g.stride + kx - g.pad;
            out[ix] = (x >= 0 && x < g.large_w) ? src[x] : T(0);
          }
        }
      }
    }
  }
}

template <typename T>
void scatter_patches(const T* cols, const PatchGeometry& g, T* image) {
  const int cells = g.small_h * g.small_w;
  for (int c = 0; c < g.channels; ++c) {
    T* plane = image + static_cast<size_t>(c) * g.large_h * g.large_w;
    for (int ky = 0; ky < g.kernel; ++ky) {
      for (int kx = 0; kx < g.kernel; ++kx) {
        const T* row = cols + (static_cast<size_t>(c) * g.kernel * g.kernel + ky * g.kernel + kx) * cells;
        for (int iy = 0; iy < g.small_h; ++iy) {
          const int y = iy * g.stride + ky - g.pad;
          if (y < 0 || y >= g.large_h) continue;
          const T* in = row + iy * g.small_w;
          T* dst = plane + static_cast<size_t>(y) * g.large_w;
          for (int ix = 0; ix < g.small_w; ++ix) {
            const int x = ix * g.stride + kx - g.pad;
            if (x >= 0 && x < g.large_w) dst[x] += in[ix];
          }
        }
      }
    }
  }
}

// ---- Conv2d ----

template <typename T>
Conv2d<T>::Conv2d(std::string name, int in, int out, int kernel, int stride, int pad, bool bias, Rng& rng)
    : in_(in), out_(out), k_(kernel), s_(stride), p_(pad), has_bias_(bias),
      weight_(make_param<T>(name + ".weight", out, in, kernel, kernel)),
      bias_(make_param<T>(name + ".bias", bias ? out : 0, 1)) {
  he_init(weight_.value, static_cast<double>(in) * kernel * kernel, rng);
}

template <typename T>
PatchGeometry Conv2d<T>::geometry(int h, int w) const {
  return {in_, h, w, output_size(h, k_, s_, p_), output_size(w, k_, s_, p_), k_, s_, p_};
}

template <typename T>
Tensor<T> Conv2d<T>::forward(const Tensor<T>& x, bool) {
  require(x.c == in_, "conv input channels " + x.shape_string());
  input_ = x;
  const PatchGeometry g = geometry(x.h, x.w);
  const int cells = g.small_h * g.small_w;
  const int rows = in_ * k_ * k_;
  Tensor<T> y(x.n, out_, g.small_h, g.small_w);
  std::vector<T> cols(static_cast<size_t>(rows) * cells);
  CMapM<T> W(weight_.value.data.data(), out_, rows);
  for (int i = 0; i < x.n; ++i) {
    gather_patches(x.image(i), g, cols.data());
    MapM<T> Y(y.image(i), out_, cells);
    Y.noalias() = W * CMapM<T>(cols.data(), rows, cells);
    if (has_bias_)
      for (int o = 0; o < out_; ++o) Y.row(o).array() += bias_.value.data[o];
  }
  return y;
}

template <typename T>
Tensor<T> Conv2d<T>::backward(const Tensor<T>& dy) {
  const Tensor<T>& x = input_;
  const PatchGeometry g = geometry(x.h, x.w);
  const int cells = g.small_h * g.small_w;
  const int rows = in_ * k_ * k_;
  require(dy.n == x.n && dy.c == out_ && dy.h == g.small_h && dy.w == g.small_w, "conv grad shape");
  Tensor<T> dx(x.n, x.c, x.h, x.w);
  std::vector<T> cols(static_cast<size_t>(rows) * cells);
  std::vector<T> dcols(cols.size());
  CMapM<T> W(weight_.value.data.data(), out_, rows);
  MapM<T> dW(weight_.grad.data.data(), out_, rows);
  for (int i = 0; i < x.n; ++i) {
    gather_patches(x.image(i), g, cols.data());
    CMapM<T> dY(dy.image(i), out_, cells);
    dW.noalias() += dY * CMapM<T>(cols.data(), rows, cells).transpose();
    if (has_bias_)
      for (int o = 0; o < out_; ++o) bias_.grad.data[o] += dY.row(o).sum();
    MapM<T>(dcols.data(), rows, cells).noalias() = W.transpose() * dY;
    scatter_patches(dcols.data(), g, dx.image(i));
  }
  return dx;
}

template <typename T>
void Conv2d<T>::collect(std::vector<Param<T>*>& params, std::vector<Buffer<T>>&) {
  params.push_back(&weight_);
  if (has_bias_) params.push_back(&bias_);
}

template <typename T>
std::string Conv2d<T>::describe() const {
  return "Conv2d(" + std::to_string(in_) + "->" + std::to_string(out_) + ", k" + std::to_string(k_) +
         " s" + std::to_string(s_) + ")";
}

// ---- ConvTranspose2d ----

template <typename T>
ConvTranspose2d<T>::ConvTranspose2d(std::string name, int in, int out, int kernel, int stride, Rng& rng)
    : in_(in), out_(out), k_(kernel), s_(stride), p_(std::max(kernel - stride, 0) / 2),
      weight_(make_param<T>(name + ".weight", in, out, kernel, kernel)),
      bias_(make_param<T>(name + ".bias", out, 1)) {
  const int taps = (kernel + stride - 1) / stride;
  he_init(weight_.value, static_cast<double>(in) * taps * taps, rng);
}

template <typename T>
PatchGeometry ConvTranspose2d<T>::geometry(int h, int w) const {
  return {out_, h * s_, w * s_, h, w, k_, s_, p_};
}

template <typename T>
Tensor<T> ConvTranspose2d<T>::forward(const Tensor<T>& x, bool) {
  require(x.c == in_, "deconv input channels " + x.shape_string());
  input_ = x;
  const PatchGeometry g = geometry(x.h, x.w);
  const int cells = x.h * x.w;
  const int rows = out_ * k_ * k_;
  Tensor<T> y(x.n, out_, g.large_h, g.large_w);
  std::vector<T> cols(static_cast<size_t>(rows) * cells);
  CMapM<T> W(weight_.value.data.data(), in_, rows);
  for (int i = 0; i < x.n; ++i) {
    MapM<T>(cols.data(), rows, cells).noalias() = W.transpose() * CMapM<T>(x.image(i), in_, cells);
    scatter_patches(cols.data(), g, y.image(i));
    T* img = y.image(i);
    for (int o = 0; o < out_; ++o) {
      T* plane = img + static_cast<size_t>(o) * y.plane();
      for (int p = 0; p < y.plane(); ++p) plane[p] += bias_.value.data[o];
    }
  }
  return y;
}

template <typename T>
Tensor<T> ConvTranspose2d<T>::backward(const Tensor<T>& dy) {
  const Tensor<T>& x = input_;
  const PatchGeometry g = geometry(x.h, x.w);
  const int cells = x.h * x.w;
  const int rows = out_ * k_ * k_;
  require(dy.n == x.n && dy.c == out_ && dy.h == g.large_h && dy.w == g.large_w, "deconv grad shape");
  Tensor<T> dx(x.n, x.c, x.h, x.w);
  std::vector<T> dcols(static_cast<size_t>(rows) * cells);
  CMapM<T> W(weight_.value.data.data(), in_, rows);
  MapM<T> dW(weight_.grad.data.data(), in_, rows);
  for (int i = 0; i < x.n; ++i) {
    gather_patches(dy.image(i), g, dcols.data());
    CMapM<T> dC(dcols.data(), rows, cells);
    CMapM<T> X(x.image(i), in_, cells);
    dW.noalias() += X * dC.transpose();
    MapM<T>(dx.image(i), in_, cells).noalias() = W * dC;
    const T* img = dy.image(i);
    for (int o = 0; o < out_; ++o) {
      const T* plane = img + static_cast<size_t>(o) * dy.plane();
      T acc = 0;
      for (int p = 0; p < dy.plane(); ++p) acc += plane[p];
      bias_.grad.data[o] += acc;
    }
  }
  return dx;
}

template <typename T>
void ConvTranspose2d<T>::collect(std::vector<Param<T>*>& params, std::vector<Buffer<T>>&) {
  params.push_back(&weight_);
  params.push_back(&bias_);
}

template <typename T>
std::string ConvTranspose2d<T>::describe() const {
  return "ConvTranspose2d(" + std::to_string(in_) + "->" + std::to_string(out_) + ", k" +
         std::to_string(k_) + " s" + std::to_string(s_) + ")";
}

// ---- BatchNorm2d ----

template <typename T>
BatchNorm2d<T>::BatchNorm2d(std::string name, int channels, double momentum, double eps)
    : name_(std::move(name)), c_(channels), momentum_(momentum), eps_(eps),
      gamma_(make_param<T>(name_ + ".gamma", channels, 1)),
      beta_(make_param<T>(name_ + ".beta", channels, 1)),
      running_mean_(channels, 1), running_var_(channels, 1, 1, 1, T(1)) {
  gamma_.value.fill(T(1));
}

template <typename T>
Tensor<T> BatchNorm2d<T>::forward(const Tensor<T>& x, bool training) {
  require(x.c == c_, "batchnorm channels " + x.shape_string());
  last_training_ = training;
  const int plane = x.plane();
  const double count = static_cast<double>(x.n) * plane;
  Tensor<T> y(x.n, x.c, x.h, x.w);
  xhat_ = Tensor<T>(x.n, x.c, x.h, x.w);
  inv_std_.assign(c_, T(0));
  for (int ch = 0; ch < c_; ++ch) {
    double mean, var;
    if (training) {
      double s = 0.0;
      for (int i = 0; i < x.n; ++i) {
        const T* p = x.image(i) + static_cast<size_t>(ch) * plane;
        for (int k = 0; k < plane; ++k) s += p[k];
      }
      mean = s / count;
      double ss = 0.0;
      for (int i = 0; i < x.n; ++i) {
        const T* p = x.image(i) + static_cast<size_t>(ch) * plane;
        for (int k = 0; k < plane; ++k) ss += (p[k] - mean) * (p[k] - mean);
      }
      var = ss / count;
      const double unbiased = count > 1 ? ss / (count - 1) : var;
      running_mean_.data[ch] = static_cast<T>((1 - momentum_) * running_mean_.data[ch] + momentum_ * mean);
      running_var_.data[ch] = static_cast<T>((1 - momentum_) * running_var_.data[ch] + momentum_ * unbiased);
    } else {
      mean = running_mean_.data[ch];
      var = running_var_.data[ch];
    }
    const double inv = 1.0 / std::sqrt(var + eps_);
    inv_std_[ch] = static_cast<T>(inv);
    const T g = gamma_.value.data[ch];
    const T b = beta_.value.data[ch];
    for (int i = 0; i < x.n; ++i) {
      const size_t off = i * x.image_size() + static_cast<size_t>(ch) * plane;
      for (int k = 0; k < plane; ++k) {
        const T xh = static_cast<T>((x.data[off + k] - mean) * inv);
        xhat_.data[off + k] = xh;
        y.data[off + k] = g * xh + b;
      }
    }
  }
  return y;
}

template <typename T>
Tensor<T> BatchNorm2d<T>::backward(const Tensor<T>& dy) {
  require(dy.same_shape(xhat_), "batchnorm grad shape");
  const int plane = dy.plane();
  const double count = static_cast<double>(dy.n) * plane;
  Tensor<T> dx(dy.n, dy.c, dy.h, dy.w);
  for (int ch = 0; ch < c_; ++ch) {
    double sum_dy = 0.0, sum_dy_xhat = 0.0;
    for (int i = 0; i < dy.n; ++i) {
      const size_t off = i * dy.image_size() + static_cast<size_t>(ch) * plane;
      for (int k = 0; k < plane; ++k) {
        sum_dy += dy.data[off + k];
        sum_dy_xhat += static_cast<double>(dy.data[off + k]) * xhat_.data[off + k];
      }
    }
    gamma_.grad.data[ch] += static_cast<T>(sum_dy_xhat);
    beta_.grad.data[ch] += static_cast<T>(sum_dy);
    const double g = gamma_.value.data[ch];
    const double inv = inv_std_[ch];
    for (int i = 0; i < dy.n; ++i) {
      const size_t off = i * dy.image_size() + static_cast<size_t>(ch) * plane;
      for (int k = 0; k < plane; ++k) {
        if (last_training_) {
          dx.data[off + k] = static_cast<T>(g * inv / count *
                                            (count * dy.data[off + k] - sum_dy - xhat_.data[off + k] * sum_dy_xhat));
        } else {
          dx.data[off + k] = static_cast<T>(g * inv * dy.data[off + k]);
        }
      }
    }
  }
  return dx;
}

template <typename T>
void BatchNorm2d<T>::collect(std::vector<Param<T>*>& params, std::vector<Buffer<T>>& buffers) {
  params.push_back(&gamma_);
  params.push_back(&beta_);
  buffers.push_back({name_ + ".running_mean", &running_mean_});
  buffers.push_back({name_ + ".running_var", &running_var_});
}

template <typename T>
std::string BatchNorm2d<T>::describe() const {
  return "BatchNorm2d(" + std::to_string(c_) + ")";
}

// ---- ReLU ----

template <typename T>
Tensor<T> ReLU<T>::forward(const Tensor<T>& x, bool) {
  output_ = x;
  for (T& v : output_.data) v = v > T(0) ? v : T(0);
  return output_;
}

template <typename T>
Tensor<T> ReLU<T>::backward(const Tensor<T>& dy) {
  Tensor<T> dx = dy;
  for (size_t i = 0; i < dx.data.size(); ++i)
    if (!(output_.data[i] > T(0))) dx.data[i] = T(0);
  return dx;
}

// ---- Dropout ----

template <typename T>
Tensor<T> Dropout<T>::forward(const Tensor<T>& x, bool training) {
  mask_.clear();
  if (!training || p_ <= 0.0) return x;
  const T keep_scale = static_cast<T>(1.0 / (1.0 - p_));
  mask_.resize(x.data.size());
  Tensor<T> y = x;
  for (size_t i = 0; i < y.data.size(); ++i) {
    mask_[i] = rng_.bernoulli(p_) ? T(0) : keep_scale;
    y.data[i] *= mask_[i];
  }
  return y;
}

template <typename T>
Tensor<T> Dropout<T>::backward(const Tensor<T>& dy) {
  if (mask_.empty()) return dy;
  Tensor<T> dx = dy;
  for (size_t i = 0; i < dx.data.size(); ++i) dx.data[i] *= mask_[i];
  return dx;
}

// ---- Linear ----

template <typename T>
Linear<T>::Linear(std::string name, int in, int out, Rng& rng)
    : in_(in), out_(out), weight_(make_param<T>(name + ".weight", out, in)),
      bias_(make_param<T>(name + ".bias", out, 1)) {
  he_init(weight_.value, in, rng);
}

template <typename T>
Tensor<T> Linear<T>::forward(const Tensor<T>& x, bool) {
  require(static_cast<int>(x.image_size()) == in_, "linear input " + x.shape_string());
  input_ = x;
  Tensor<T> y(x.n, out_);
  MapM<T> Y(y.data.data(), x.n, out_);
  Y.noalias() = CMapM<T>(x.data.data(), x.n, in_) * CMapM<T>(weight_.value.data.data(), out_, in_).transpose();
  for (int i = 0; i < x.n; ++i)
    for (int o = 0; o < out_; ++o) Y(i, o) += bias_.value.data[o];
  return y;
}

template <typename T>
Tensor<T> Linear<T>::backward(const Tensor<T>& dy) {
  require(dy.n == input_.n && static_cast<int>(dy.image_size()) == out_, "linear grad shape");
  CMapM<T> dY(dy.data.data(), dy.n, out_);
  CMapM<T> X(input_.data.data(), input_.n, in_);
  MapM<T>(weight_.grad.data.data(), out_, in_).noalias() += dY.transpose() * X;
  for (int o = 0; o < out_; ++o) bias_.grad.data[o] += dY.col(o).sum();
  Tensor<T> dx(input_.n, input_.c, input_.h, input_.w);
  MapM<T>(dx.data.data(), input_.n, in_).noalias() = dY * CMapM<T>(weight_.value.data.data(), out_, in_);
  return dx;
}

template <typename T>
void Linear<T>::collect(std::vector<Param<T>*>& params, std::vector<Buffer<T>>&) {
  params.push_back(&weight_);
  params.push_back(&bias_);
}

template <typename T>
std::string Linear<T>::describe() const {
  return "Linear(" + std::to_string(in_) + "->" + std::to_string(out_) + ")";
}

// ---- GlobalAvgPool ----

template <typename T>
Tensor<T> GlobalAvgPool<T>::forward(const Tensor<T>& x, bool) {
  h_ = x.h;
  w_ = x.w;
  Tensor<T> y(x.n, x.c);
  const int plane = x.plane();
  for (int i = 0; i < x.n; ++i)
    for (int ch = 0; ch < x.c; ++ch) {
      const T* p = x.image(i) + static_cast<size_t>(ch) * plane;
      double s = 0.0;
      for (int k = 0; k < plane; ++k) s += p[k];
      y.at(i, ch) = static_cast<T>(s / plane);
    }
  return y;
}

template <typename T>
Tensor<T> GlobalAvgPool<T>::backward(const Tensor<T>& dy) {
  Tensor<T> dx(dy.n, dy.c, h_, w_);
  const int plane = h_ * w_;
  for (int i = 0; i < dy.n; ++i)
    for (int ch = 0; ch < dy.c; ++ch) {
      const T g = dy.at(i, ch) / static_cast<T>(plane);
      T* p = dx.image(i) + static_cast<size_t>(ch) * plane;
      for (int k = 0; k < plane; ++k) p[k] = g;
    }
  return dx;
}

// ---- ChannelSoftmax ----

template <typename T>
Tensor<T> ChannelSoftmax<T>::forward(const Tensor<T>& x, bool) {
  output_ = Tensor<T>(x.n, x.c, x.h, x.w);
  const int plane = x.plane();
  for (int i = 0; i < x.n; ++i) {
    const T* in = x.image(i);
    T* out = output_.image(i);
    for (int p = 0; p < plane; ++p) {
      T m = in[p];
      for (int ch = 1; ch < x.c; ++ch) m = std::max(m, in[static_cast<size_t>(ch) * plane + p]);
      T total = 0;
      for (int ch = 0; ch < x.c; ++ch) {
        const T e = std::exp(in[static_cast<size_t>(ch) * plane + p] - m);
        out[static_cast<size_t>(ch) * plane + p] = e;
        total += e;
      }
      for (int ch = 0; ch < x.c; ++ch) out[static_cast<size_t>(ch) * plane + p] /= total;
    }
  }
  return output_;
}

template <typename T>
Tensor<T> ChannelSoftmax<T>::backward(const Tensor<T>& dy) {
  Tensor<T> dx(dy.n, dy.c, dy.h, dy.w);
  const int plane = dy.plane();
  for (int i = 0; i < dy.n; ++i) {
    const T* s = output_.image(i);
    const T* g = dy.image(i);
    T* out = dx.image(i);
    for (int p = 0; p < plane; ++p) {
      T dot = 0;
      for (int ch = 0; ch < dy.c; ++ch) dot += s[static_cast<size_t>(ch) * plane + p] * g[static_cast<size_t>(ch) * plane + p];
      for (int ch = 0; ch < dy.c; ++ch) {
        const size_t k = static_cast<size_t>(ch) * plane + p;
        out[k] = s[k] * (g[k] - dot);
      }
    }
  }
  return dx;
}

// ---- Sequential ----

template <typename T>
Tensor<T> Sequential<T>::forward(const Tensor<T>& x, bool training) {
  Tensor<T> h = x;
  for (auto& l : layers_) h = l->forward(h, training);
  return h;
}

template <typename T>
Tensor<T> Sequential<T>::backward(const Tensor<T>& dy) {
  Tensor<T> g = dy;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  return g;
}

template <typename T>
void Sequential<T>::collect(std::vector<Param<T>*>& params, std::vector<Buffer<T>>& buffers) {
  for (auto& l : layers_) l->collect(params, buffers);
}

template <typename T>
std::string Sequential<T>::describe() const {
  std::string s;
  for (const auto& l : layers_) s += (s.empty() ? "" : " -> ") + l->describe();
  return s;
}

// ---- PreActBlock ----

template <typename T>
PreActBlock<T>::PreActBlock(const std::string& name, int in, int out, int stride, Rng& rng)
    : bn1_(name + ".bn1", in), conv1_(name + ".conv1", in, out, 3, stride, 1, false, rng),
      bn2_(name + ".bn2", out), conv2_(name + ".conv2", out, out, 3, 1, 1, false, rng) {
  if (in != out || stride != 1)
    shortcut_ = std::make_unique<Conv2d<T>>(name + ".shortcut", in, out, 1, stride, 0, false, rng);
}

template <typename T>
Tensor<T> PreActBlock<T>::forward(const Tensor<T>& x, bool training) {
  const Tensor<T> a = relu1_.forward(bn1_.forward(x, training), training);
  Tensor<T> h = conv2_.forward(relu2_.forward(bn2_.forward(conv1_.forward(a, training), training), training), training);
  const Tensor<T>& skip = shortcut_ ? shortcut_->forward(a, training) : x;
  require(skip.same_shape(h), "residual shapes");
  for (size_t i = 0; i < h.data.size(); ++i) h.data[i] += skip.data[i];
  return h;
}

template <typename T>
Tensor<T> PreActBlock<T>::backward(const Tensor<T>& dy) {
  Tensor<T> da = conv1_.backward(bn2_.backward(relu2_.backward(conv2_.backward(dy))));
  if (shortcut_) {
    const Tensor<T> ds = shortcut_->backward(dy);
    for (size_t i = 0; i < da.data.size(); ++i) da.data[i] += ds.data[i];
  }
  Tensor<T> dx = bn1_.backward(relu1_.backward(da));
  if (!shortcut_)
    for (size_t i = 0; i < dx.data.size(); ++i) dx.data[i] += dy.data[i];
  return dx;
}

template <typename T>
void PreActBlock<T>::collect(std::vector<Param<T>*>& params, std::vector<Buffer<T>>& buffers) {
  bn1_.collect(params, buffers);
  conv1_.collect(params, buffers);
  bn2_.collect(params, buffers);
  conv2_.collect(params, buffers);
  if (shortcut_) shortcut_->collect(params, buffers);
}

template <typename T>
std::string PreActBlock<T>::describe() const {
  return "PreActBlock[" + conv1_.describe() + ", " + conv2_.describe() +
         (shortcut_ ? ", shortcut " + shortcut_->describe() : std::string()) + "]";
}

// ---- PreActBottleneck ----

template <typename T>
PreActBottleneck<T>::PreActBottleneck(const std::string& name, int in, int mid, int out, int stride, Rng& rng)
    : bn1_(name + ".bn1", in), conv1_(name + ".conv1", in, mid, 1, 1, 0, false, rng),
      bn2_(name + ".bn2", mid), conv2_(name + ".conv2", mid, mid, 3, stride, 1, false, rng),
      bn3_(name + ".bn3", mid), conv3_(name + ".conv3", mid, out, 1, 1, 0, false, rng) {
  if (in != out || stride != 1)
    shortcut_ = std::make_unique<Conv2d<T>>(name + ".shortcut", in, out, 1, stride, 0, false, rng);
}

template <typename T>
Tensor<T> PreActBottleneck<T>::forward(const Tensor<T>& x, bool training) {
  const Tensor<T> a = relu1_.forward(bn1_.forward(x, training), training);
  Tensor<T> h = conv1_.forward(a, training);
  h = conv2_.forward(relu2_.forward(bn2_.forward(h, training), training), training);
  h = conv3_.forward(relu3_.forward(bn3_.forward(h, training), training), training);
  const Tensor<T>& skip = shortcut_ ? shortcut_->forward(a, training) : x;
  require(skip.same_shape(h), "residual shapes");
  for (size_t i = 0; i < h.data.size(); ++i) h.data[i] += skip.data[i];
  return h;
}

template <typename T>
Tensor<T> PreActBottleneck<T>::backward(const Tensor<T>& dy) {
  Tensor<T> g = bn3_.backward(relu3_.backward(conv3_.backward(dy)));
  g = bn2_.backward(relu2_.backward(conv2_.backward(g)));
  Tensor<T> da = conv1_.backward(g);
  if (shortcut_) {
    const Tensor<T> ds = shortcut_->backward(dy);
    for (size_t i = 0; i < da.data.size(); ++i) da.data[i] += ds.data[i];
  }
  Tensor<T> dx = bn1_.backward(relu1_.backward(da));
  if (!shortcut_)
    for (size_t i = 0; i < dx.data.size(); ++i) dx.data[i] += dy.data[i];
  return dx;
}

template <typename T>
void PreActBottleneck<T>::collect(std::vector<Param<T>*>& params, std::vector<Buffer<T>>& buffers) {
  bn1_.collect(params, buffers);
  conv1_.collect(params, buffers);
  bn2_.collect(params, buffers);
  conv2_.collect(params, buffers);
  bn3_.collect(params, buffers);
  conv3_.collect(params, buffers);
  if (shortcut_) shortcut_->collect(params, buffers);
}

template <typename T>
std::string PreActBottleneck<T>::describe() const {
  return "PreActBottleneck[" + conv1_.describe() + ", " + conv2_.describe() + ", " + conv3_.describe() + "]";
}

#define FD_INSTANTIATE(T)                                                      \
  template void gather_patches<T>(const T*, const PatchGeometry&, T*);         \
  template void scatter_patches<T>(const T*, const PatchGeometry&, T*);        \
  template class Conv2d<T>;                                                    \
  template class ConvTranspose2d<T>;                                           \
  template class BatchNorm2d<T>;                                               \
  template class ReLU<T>;                                                      \
  template class Dropout<T>;                                                   \
  template class Linear<T>;                                                    \
  template class GlobalAvgPool<T>;                                             \
  template class ChannelSoftmax<T>;                                            \
  template class Sequential<T>;                                                \
  template class PreActBlock<T>;                                               \
  template class PreActBottleneck<T>;

FD_INSTANTIATE(float)
FD_INSTANTIATE(double)

}  // namespace fusiondrive::nn
