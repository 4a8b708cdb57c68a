#pragma once

#include "common/raster.hpp"

namespace fusiondrive::data {

/// Drops the top half of the frame, area-resizes the rest to size x size and
/// stacks R, G, B (and D unless include_depth is false). Values stay in [0, 1].
/// Throws Error(kShapeMismatch) when the rasters are not pixel-aligned.
ImageF preprocess(const ImageF& rgb, const ImageF& depth, int size, bool include_depth = true);

/// Same crop for the label raster, resized by nearest neighbour.
LabelImage preprocess_labels(const LabelImage& semantic, int size);

/// Area (box-filter) resize of any channel count.
ImageF resize_area(const ImageF& image, int out_width, int out_height);

/// Rows [y0, y0 + h) of the image.
template <typename T>
Raster<T> crop_rows(const Raster<T>& image, int y0, int h) {
  Raster<T> out(image.width, h, image.channels);
  const size_t row = static_cast<size_t>(image.width) * image.channels;
  for (int y = 0; y < h; ++y)
    std::copy_n(image.data.begin() + static_cast<long>((y0 + y) * row), row,
                out.data.begin() + static_cast<long>(y * row));
  return out;
}

}  // namespace fusiondrive::data
