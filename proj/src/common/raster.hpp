#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fusiondrive {

/// Interleaved (row-major, channel-last) image buffer.
template <typename T>
struct Raster {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<T> data;

  Raster() = default;
  Raster(int w, int h, int c, T fill = T{})
      : width(w), height(h), channels(c),
        data(static_cast<size_t>(w) * h * c, fill) {}

  T& at(int x, int y, int c = 0) {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  const T& at(int x, int y, int c = 0) const {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  size_t pixel_count() const { return static_cast<size_t>(width) * height; }
  bool empty() const { return data.empty(); }

  bool operator==(const Raster&) const = default;
};

using ImageF = Raster<float>;
using LabelImage = Raster<uint8_t>;

}  // namespace fusiondrive
