#include "datapipe/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "common/error.hpp"

namespace fusiondrive::data {
namespace {

struct Tap {
  int index;
  double weight;
};

// Source pixels covered by each output pixel, weighted by overlap.
std::vector<std::vector<Tap>> area_taps(int in, int out) {
  std::vector<std::vector<Tap>> taps(static_cast<size_t>(out));
  const double scale = static_cast<double>(in) / out;
  for (int o = 0; o < out; ++o) {
    const double a = o * scale;
    const double b = (o + 1) * scale;
    double total = 0.0;
    for (int i = static_cast<int>(std::floor(a)); i < std::min(in, static_cast<int>(std::ceil(b))); ++i) {
      const double w = std::min<double>(b, i + 1) - std::max<double>(a, i);
      if (w <= 0.0) continue;
      taps[o].push_back({i, w});
      total += w;
    }
    for (Tap& t : taps[o]) t.weight /= total;
  }
  return taps;
}

}  // namespace

ImageF resize_area(const ImageF& image, int out_width, int out_height) {
  if (out_width <= 0 || out_height <= 0 || image.empty())
    throw Error(ErrorCode::kInvalidArgument, "resize to an empty raster");
  const int c = image.channels;
  const auto tx = area_taps(image.width, out_width);
  const auto ty = area_taps(image.height, out_height);
  std::vector<double> rows(static_cast<size_t>(image.height) * out_width * c);
  for (int y = 0; y < image.height; ++y)
    for (int ox = 0; ox < out_width; ++ox)
      for (int k = 0; k < c; ++k) {
        double acc = 0.0;
        for (const Tap& t : tx[ox]) acc += t.weight * image.at(t.index, y, k);
        rows[(static_cast<size_t>(y) * out_width + ox) * c + k] = acc;
      }
  ImageF out(out_width, out_height, c);
  for (int oy = 0; oy < out_height; ++oy)
    for (int ox = 0; ox < out_width; ++ox)
      for (int k = 0; k < c; ++k) {
        double acc = 0.0;
        for (const Tap& t : ty[oy]) acc += t.weight * rows[(static_cast<size_t>(t.index) * out_width + ox) * c + k];
        out.at(ox, oy, k) = static_cast<float>(std::clamp(acc, 0.0, 1.0));
      }
  return out;
}

ImageF preprocess(const ImageF& rgb, const ImageF& depth, int size, bool include_depth) {
  if (rgb.channels != 3 || depth.channels != 1 || rgb.width != depth.width ||
      rgb.height != depth.height)
    throw Error(ErrorCode::kShapeMismatch, "rgb and depth rasters are not aligned");
  if (size <= 0 || rgb.height < 2) throw Error(ErrorCode::kInvalidArgument, "invalid preprocess size");
  const int top = rgb.height / 2;
  const int keep = rgb.height - top;
  const int channels = include_depth ? 4 : 3;
  ImageF stacked(rgb.width, keep, channels);
  for (int y = 0; y < keep; ++y)
    for (int x = 0; x < rgb.width; ++x) {
      for (int k = 0; k < 3; ++k) stacked.at(x, y, k) = rgb.at(x, top + y, k);
      if (include_depth) stacked.at(x, y, 3) = depth.at(x, top + y, 0);
    }
  return resize_area(stacked, size, size);
}

LabelImage preprocess_labels(const LabelImage& semantic, int size) {
  if (size <= 0 || semantic.height < 2) throw Error(ErrorCode::kInvalidArgument, "invalid preprocess size");
  const int top = semantic.height / 2;
  const int keep = semantic.height - top;
  LabelImage out(size, size, 1);
  for (int oy = 0; oy < size; ++oy) {
    const int sy = std::min(keep - 1, static_cast<int>((oy + 0.5) * keep / size));
    for (int ox = 0; ox < size; ++ox) {
      const int sx = std::min(semantic.width - 1, static_cast<int>((ox + 0.5) * semantic.width / size));
      out.at(ox, oy) = semantic.at(sx, top + sy);
    }
  }
  return out;
}

}  // namespace fusiondrive::data
