#include "datapipe/augment.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "common/rng.hpp"

namespace fusiondrive::data {

AugmentDraw augment_draw(uint64_t seed, const AugmentParams& params) {
  Rng rng(seed);
  AugmentDraw d;
  d.noise = rng.bernoulli(params.probability);
  d.dropout = rng.bernoulli(params.probability);
  d.contrast = rng.bernoulli(params.probability);
  d.blur = rng.bernoulli(params.probability);
  return d;
}

void gaussian_blur(ImageF& image, double sigma, int channels) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    total += kernel[i + radius];
  }
  for (double& k : kernel) k /= total;

  const int w = image.width;
  const int h = image.height;
  ImageF tmp = image;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < channels; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i)
          acc += kernel[i + radius] * image.at(std::clamp(x + i, 0, w - 1), y, c);
        tmp.at(x, y, c) = static_cast<float>(acc);
      }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < channels; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i)
          acc += kernel[i + radius] * tmp.at(x, std::clamp(y + i, 0, h - 1), c);
        image.at(x, y, c) = static_cast<float>(acc);
      }
}

ImageF augment(const ImageF& image, uint64_t seed, const AugmentParams& params, AugmentDraw* fired) {
  const AugmentDraw draw = augment_draw(seed, params);
  if (fired) *fired = draw;
  ImageF out = image;
  if (!draw.any()) return out;

  Rng rng(mix_seed(seed, 0xA46ULL));
  const int channels = std::min(3, image.channels);
  const int w = image.width;
  const int h = image.height;

  if (draw.contrast) {
    const double gain = rng.uniform(params.contrast_min, params.contrast_max);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int c = 0; c < channels; ++c)
          out.at(x, y, c) = static_cast<float>(gain * (out.at(x, y, c) - 0.5) + 0.5);
  }
  if (draw.blur) gaussian_blur(out, rng.uniform(params.blur_sigma_min, params.blur_sigma_max), channels);
  if (draw.noise) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int c = 0; c < channels; ++c)
          out.at(x, y, c) = static_cast<float>(out.at(x, y, c) + rng.normal(0.0, params.noise_sigma));
  }
  if (draw.dropout) {
    const int rects = static_cast<int>(rng.uniform_int(1, 4));
    const double area_each = params.dropout_max_area * w * h / rects;
    for (int r = 0; r < rects; ++r) {
      const double aspect = rng.uniform(0.5, 2.0);
      const int rw = std::clamp(static_cast<int>(std::floor(std::sqrt(area_each * aspect))), 1, w);
      const int rh = std::clamp(static_cast<int>(std::floor(area_each / rw)), 1, h);
      const int x0 = static_cast<int>(rng.uniform_int(0, w - rw));
      const int y0 = static_cast<int>(rng.uniform_int(0, h - rh));
      for (int y = y0; y < y0 + rh; ++y)
        for (int x = x0; x < x0 + rw; ++x)
          for (int c = 0; c < channels; ++c) out.at(x, y, c) = 0.0f;
    }
  }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < channels; ++c) out.at(x, y, c) = std::clamp(out.at(x, y, c), 0.0f, 1.0f);
  return out;
}

}  // namespace fusiondrive::data
