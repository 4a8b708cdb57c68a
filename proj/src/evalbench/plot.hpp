#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "common/raster.hpp"
#include "evalbench/episode.hpp"
#include "simworld/route.hpp"
#include "simworld/town.hpp"

namespace fusiondrive::bench {

using Rgb = std::array<uint8_t, 3>;

/// 8-bit RGB drawing surface with just enough primitives for line plots.
class Canvas {
 public:
  Canvas(int width, int height, Rgb background = {255, 255, 255});

  int width() const { return image_.width; }
  int height() const { return image_.height; }
  const Raster<uint8_t>& image() const { return image_; }

  void set(int x, int y, Rgb c);
  void fill_rect(int x0, int y0, int x1, int y1, Rgb c);
  void line(double x0, double y0, double x1, double y1, Rgb c, int thickness = 1);
  /// Digits, '.', '-' and ' ' in a 3x5 pixel font scaled by `scale`.
  void text(int x, int y, const std::string& s, Rgb c, int scale = 2);

 private:
  Raster<uint8_t> image_;
};

struct Series {
  std::string name;
  std::vector<TrajectoryPoint> points;
  Rgb color;
};

/// Top-down road map around the trajectories with the route centerline.
Raster<uint8_t> plot_trajectories(const sim::TownMap& town, const sim::Polyline* route,
                                  std::span<const Series> series, double pixels_per_meter = 6.0);

/// Yaw rate (deg/s) over episode time.
Raster<uint8_t> plot_yaw_rates(std::span<const Series> series, int width = 800, int height = 400);

/// Label raster as colours.
Raster<uint8_t> colorize_semantics(const LabelImage& labels);

/// Float image in [0, 1] with 1 or 3 channels as 8-bit.
Raster<uint8_t> to_rgb8(const ImageF& image);

}  // namespace fusiondrive::bench
