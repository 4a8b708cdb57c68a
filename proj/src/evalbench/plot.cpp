#include "evalbench/plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace fusiondrive::bench {
namespace {

// Rows top to bottom, 3 bits each, high bit leftmost.
struct Glyph {
  char c;
  std::array<uint8_t, 5> rows;
};
constexpr std::array<Glyph, 13> kFont = {{{'0', {7, 5, 5, 5, 7}},
                                          {'1', {2, 6, 2, 2, 7}},
                                          {'2', {7, 1, 7, 4, 7}},
                                          {'3', {7, 1, 7, 1, 7}},
                                          {'4', {5, 5, 7, 1, 1}},
                                          {'5', {7, 4, 7, 1, 7}},
                                          {'6', {7, 4, 7, 5, 7}},
                                          {'7', {7, 1, 1, 1, 1}},
                                          {'8', {7, 5, 7, 5, 7}},
                                          {'9', {7, 5, 7, 1, 7}},
                                          {'.', {0, 0, 0, 0, 2}},
                                          {'-', {0, 0, 7, 0, 0}},
                                          {' ', {0, 0, 0, 0, 0}}}};

std::string tick_label(double v) {
  char buf[32];
  const double a = std::abs(v);
  std::snprintf(buf, sizeof(buf), a >= 100 || a == std::floor(a) ? "%.0f" : (a >= 10 ? "%.1f" : "%.2f"), v);
  return buf;
}

double nice_step(double range, int target) {
  const double raw = range / std::max(target, 1);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) return m * mag;
  return 10.0 * mag;
}

}  // namespace

Canvas::Canvas(int width, int height, Rgb background) : image_(width, height, 3) {
  for (size_t i = 0; i < image_.pixel_count(); ++i)
    for (int c = 0; c < 3; ++c) image_.data[i * 3 + c] = background[c];
}

void Canvas::set(int x, int y, Rgb c) {
  if (x < 0 || y < 0 || x >= image_.width || y >= image_.height) return;
  for (int k = 0; k < 3; ++k) image_.at(x, y, k) = c[k];
}

void Canvas::fill_rect(int x0, int y0, int x1, int y1, Rgb c) {
  for (int y = std::max(y0, 0); y <= std::min(y1, image_.height - 1); ++y)
    for (int x = std::max(x0, 0); x <= std::min(x1, image_.width - 1); ++x) set(x, y, c);
}

void Canvas::line(double x0, double y0, double x1, double y1, Rgb c, int thickness) {
  const double len = std::hypot(x1 - x0, y1 - y0);
  const int steps = std::max(1, static_cast<int>(std::ceil(len * 2)));
  const int r0 = -(thickness - 1) / 2;
  const int r1 = thickness / 2;
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    const int x = static_cast<int>(std::lround(x0 + t * (x1 - x0)));
    const int y = static_cast<int>(std::lround(y0 + t * (y1 - y0)));
    for (int dy = r0; dy <= r1; ++dy)
      for (int dx = r0; dx <= r1; ++dx) set(x + dx, y + dy, c);
  }
}

void Canvas::text(int x, int y, const std::string& s, Rgb c, int scale) {
  for (char ch : s) {
    const auto it = std::find_if(kFont.begin(), kFont.end(), [ch](const Glyph& g) { return g.c == ch; });
    if (it != kFont.end())
      for (int row = 0; row < 5; ++row)
        for (int col = 0; col < 3; ++col)
          if (it->rows[row] & (4 >> col))
            fill_rect(x + col * scale, y + row * scale, x + (col + 1) * scale - 1, y + (row + 1) * scale - 1, c);
    x += 4 * scale;
  }
}

Raster<uint8_t> plot_trajectories(const sim::TownMap& town, const sim::Polyline* route,
                                  std::span<const Series> series, double ppm) {
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
  auto grow = [&](double x, double y) {
    x0 = std::min(x0, x);
    y0 = std::min(y0, y);
    x1 = std::max(x1, x);
    y1 = std::max(y1, y);
  };
  for (const auto& s : series)
    for (const auto& p : s.points) grow(p.x, p.y);
  if (route)
    for (const auto& p : route->points()) grow(p.x, p.y);
  if (!std::isfinite(x0)) x0 = y0 = 0.0, x1 = y1 = 1.0;
  const double margin = 15.0;
  x0 -= margin, y0 -= margin, x1 += margin, y1 += margin;
  const int w = std::clamp(static_cast<int>((x1 - x0) * ppm), 64, 2400);
  const int h = std::clamp(static_cast<int>((y1 - y0) * ppm), 64, 2400);
  const double sx = w / (x1 - x0), sy = h / (y1 - y0);

  Canvas canvas(w, h);
  // Image rows follow +y, so the plot keeps the world's handedness.
  for (int py = 0; py < h; ++py) {
    for (int px = 0; px < w; ++px) {
      const sim::Vec2 p{x0 + (px + 0.5) / sx, y0 + (py + 0.5) / sy};
      switch (town.classify(p).label) {
        case sim::SemanticClass::kLane: canvas.set(px, py, {150, 150, 155}); break;
        case sim::SemanticClass::kRoadLine: canvas.set(px, py, {235, 235, 225}); break;
        case sim::SemanticClass::kSidewalk: canvas.set(px, py, {205, 198, 185}); break;
        default: canvas.set(px, py, {222, 235, 215}); break;
      }
    }
  }
  auto to_px = [&](double x, double y) { return std::pair{(x - x0) * sx, (y - y0) * sy}; };
  if (route) {
    const auto& pts = route->points();
    for (size_t i = 1; i < pts.size(); ++i) {
      const auto [ax, ay] = to_px(pts[i - 1].x, pts[i - 1].y);
      const auto [bx, by] = to_px(pts[i].x, pts[i].y);
      canvas.line(ax, ay, bx, by, {240, 200, 40}, 5);
    }
  }
  for (const auto& s : series) {
    for (size_t i = 1; i < s.points.size(); ++i) {
      const auto [ax, ay] = to_px(s.points[i - 1].x, s.points[i - 1].y);
      const auto [bx, by] = to_px(s.points[i].x, s.points[i].y);
      canvas.line(ax, ay, bx, by, s.color, 2);
    }
    if (!s.points.empty()) {
      const auto [ex, ey] = to_px(s.points.back().x, s.points.back().y);
      canvas.fill_rect(static_cast<int>(ex) - 3, static_cast<int>(ey) - 3, static_cast<int>(ex) + 3,
                       static_cast<int>(ey) + 3, s.color);
    }
  }
  return canvas.image();
}

Raster<uint8_t> plot_yaw_rates(std::span<const Series> series, int width, int height) {
  const int left = 70, right = 20, top = 20, bottom = 40;
  double t_max = 1.0, r_min = -1.0, r_max = 1.0;
  const double to_deg = 180.0 / std::numbers::pi;
  for (const auto& s : series)
    for (const auto& p : s.points) {
      const double t = p.t - s.points.front().t;
      t_max = std::max(t_max, t);
      r_min = std::min(r_min, p.yaw_rate * to_deg);
      r_max = std::max(r_max, p.yaw_rate * to_deg);
    }
  const double pad = 0.05 * (r_max - r_min);
  r_min -= pad, r_max += pad;
  Canvas canvas(width, height);
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double t) { return left + t / t_max * pw; };
  auto py = [&](double r) { return top + (r_max - r) / (r_max - r_min) * ph; };

  const double tstep = nice_step(t_max, 8);
  for (double t = 0.0; t <= t_max + 1e-9; t += tstep) {
    canvas.line(px(t), top, px(t), top + ph, {225, 225, 225});
    canvas.text(static_cast<int>(px(t)) - 6, top + static_cast<int>(ph) + 8, tick_label(t), {60, 60, 60});
  }
  const double rstep = nice_step(r_max - r_min, 6);
  for (double r = std::ceil(r_min / rstep) * rstep; r <= r_max; r += rstep) {
    canvas.line(left, py(r), left + pw, py(r), {225, 225, 225});
    canvas.text(6, static_cast<int>(py(r)) - 5, tick_label(r), {60, 60, 60});
  }
  canvas.line(left, py(0.0), left + pw, py(0.0), {150, 150, 150});
  canvas.line(left, top, left, top + ph, {0, 0, 0});
  canvas.line(left, top + ph, left + pw, top + ph, {0, 0, 0});
  for (const auto& s : series)
    for (size_t i = 1; i < s.points.size(); ++i) {
      const double ta = s.points[i - 1].t - s.points.front().t, tb = s.points[i].t - s.points.front().t;
      canvas.line(px(ta), py(s.points[i - 1].yaw_rate * to_deg), px(tb), py(s.points[i].yaw_rate * to_deg), s.color,
                  2);
    }
  return canvas.image();
}

Raster<uint8_t> colorize_semantics(const LabelImage& labels) {
  static const std::array<Rgb, 5> colors = {
      {{128, 64, 128}, {157, 234, 50}, {244, 35, 232}, {0, 0, 142}, {70, 70, 70}}};
  Raster<uint8_t> out(labels.width, labels.height, 3);
  for (size_t i = 0; i < labels.pixel_count(); ++i) {
    const Rgb c = colors[std::min<size_t>(labels.data[i * labels.channels], colors.size() - 1)];
    for (int k = 0; k < 3; ++k) out.data[i * 3 + k] = c[k];
  }
  return out;
}

Raster<uint8_t> to_rgb8(const ImageF& image) {
  Raster<uint8_t> out(image.width, image.height, 3);
  for (size_t i = 0; i < image.pixel_count(); ++i)
    for (int k = 0; k < 3; ++k) {
      const float v = image.data[i * image.channels + (image.channels == 3 ? k : 0)];
      out.data[i * 3 + k] = static_cast<uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
    }
  return out;
}

}  // namespace fusiondrive::bench
