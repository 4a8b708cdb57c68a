#pragma once

#include <cstdint>

#include <json.hpp>

#include "common/raster.hpp"

namespace fusiondrive::data {

struct AugmentParams {
  double probability = 0.1;
  double noise_sigma = 0.02;
  double dropout_max_area = 0.1;  // total zeroed fraction of the image
  double contrast_min = 0.8;
  double contrast_max = 1.2;
  double blur_sigma_min = 0.5;
  double blur_sigma_max = 1.5;

  bool operator==(const AugmentParams&) const = default;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(AugmentParams, probability, noise_sigma, dropout_max_area,
                                                contrast_min, contrast_max, blur_sigma_min, blur_sigma_max)

/// Which augmentations fire for a seed.
struct AugmentDraw {
  bool noise = false;
  bool dropout = false;
  bool contrast = false;
  bool blur = false;

  bool any() const { return noise || dropout || contrast || blur; }
};

AugmentDraw augment_draw(uint64_t seed, const AugmentParams& params = {});

/// Applies the drawn augmentations to the first three channels only; any
/// further channel (depth) is copied through. Output is clamped to [0, 1].
ImageF augment(const ImageF& image, uint64_t seed, const AugmentParams& params = {},
               AugmentDraw* fired = nullptr);

/// Separable Gaussian blur with clamped borders, on channels [0, channels).
void gaussian_blur(ImageF& image, double sigma, int channels);

}  // namespace fusiondrive::data
