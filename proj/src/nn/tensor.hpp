#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

namespace fusiondrive::nn {

/// Dense NCHW tensor; vectors use h = w = 1.
template <typename T>
struct Tensor {
  int n = 0;
  int c = 0;
  int h = 1;
  int w = 1;
  std::vector<T> data;

  Tensor() = default;
  Tensor(int n_, int c_, int h_ = 1, int w_ = 1, T fill = T(0))
      : n(n_), c(c_), h(h_), w(w_), data(static_cast<size_t>(n_) * c_ * h_ * w_, fill) {}

  size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }
  int plane() const { return h * w; }
  size_t image_size() const { return static_cast<size_t>(c) * h * w; }

  T* image(int i) { return data.data() + i * image_size(); }
  const T* image(int i) const { return data.data() + i * image_size(); }

  T& at(int i, int ch, int y = 0, int x = 0) {
    return data[((static_cast<size_t>(i) * c + ch) * h + y) * w + x];
  }
  const T& at(int i, int ch, int y = 0, int x = 0) const {
    return data[((static_cast<size_t>(i) * c + ch) * h + y) * w + x];
  }

  bool same_shape(const Tensor& o) const { return n == o.n && c == o.c && h == o.h && w == o.w; }
  void fill(T v) { std::fill(data.begin(), data.end(), v); }
  std::string shape_string() const {
    return "(" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," +
           std::to_string(w) + ")";
  }

  bool operator==(const Tensor&) const = default;
};

template <typename T>
struct Param {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;
};

/// Non-trainable state saved with the weights (batch-norm running stats).
template <typename T>
struct Buffer {
  std::string name;
  Tensor<T>* value = nullptr;
};

}  // namespace fusiondrive::nn
