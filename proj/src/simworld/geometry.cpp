#include "simworld/geometry.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace fusiondrive::sim {
namespace {

std::array<Vec2, 2> box_axes(const OrientedBox& b) {
  const Vec2 f = heading_vector(b.heading);
  return {f, right_of(f)};
}

// Half-extent of the box projected on a unit axis.
double projected_radius(const OrientedBox& b, Vec2 axis) {
  const auto [f, r] = box_axes(b);
  return b.half_length * std::abs(dot(f, axis)) + b.half_width * std::abs(dot(r, axis));
}

}  // namespace

bool boxes_overlap(const OrientedBox& a, const OrientedBox& b) {
  const Vec2 d = b.center - a.center;
  const auto axes_a = box_axes(a);
  const auto axes_b = box_axes(b);
  for (const auto& axes : {axes_a, axes_b}) {
    for (Vec2 axis : axes) {
      const double separation = std::abs(dot(d, axis));
      if (separation > projected_radius(a, axis) + projected_radius(b, axis))
        return false;
    }
  }
  return true;
}

double point_box_distance(Vec2 p, const OrientedBox& box) {
  const auto [f, r] = box_axes(box);
  const Vec2 d = p - box.center;
  const double dx = std::max(std::abs(dot(d, f)) - box.half_length, 0.0);
  const double dy = std::max(std::abs(dot(d, r)) - box.half_width, 0.0);
  return std::hypot(dx, dy);
}

Polyline::Polyline(std::vector<Vec2> points) : points_(std::move(points)) {
  cumulative_.reserve(points_.size());
  double s = 0.0;
  for (size_t i = 0; i < points_.size(); ++i) {
    if (i > 0) s += norm(points_[i] - points_[i - 1]);
    cumulative_.push_back(s);
  }
}

size_t Polyline::segment_index(double s) const {
  if (points_.size() < 2) return 0;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  size_t i = it == cumulative_.begin() ? 0 : static_cast<size_t>(it - cumulative_.begin()) - 1;
  return std::min(i, points_.size() - 2);
}

Vec2 Polyline::position_at(double s) const {
  if (points_.empty()) return {};
  if (points_.size() == 1) return points_.front();
  const size_t i = segment_index(s);
  const Vec2 a = points_[i];
  const Vec2 b = points_[i + 1];
  const double seg = cumulative_[i + 1] - cumulative_[i];
  if (seg <= 0.0) return a;
  const double t = (s - cumulative_[i]) / seg;
  return a + (b - a) * t;
}

double Polyline::heading_at(double s) const {
  if (points_.size() < 2) return 0.0;
  const size_t i = segment_index(s);
  const Vec2 d = points_[i + 1] - points_[i];
  return std::atan2(d.y, d.x);
}

Polyline::Projection Polyline::project(Vec2 p, double s_min, double s_max) const {
  Projection best;
  best.distance = std::numeric_limits<double>::infinity();
  if (points_.size() < 2) return best;
  for (size_t i = 0; i + 1 < points_.size(); ++i) {
    const double s0 = cumulative_[i];
    const double s1 = cumulative_[i + 1];
    if (s1 < s_min || s0 > s_max) continue;
    const Vec2 a = points_[i];
    const Vec2 d = points_[i + 1] - a;
    const double len = s1 - s0;
    if (len <= 0.0) continue;
    double t = dot(p - a, d) / (len * len);
    const double t_lo = std::max(0.0, (s_min - s0) / len);
    const double t_hi = std::min(1.0, (s_max - s0) / len);
    t = std::clamp(t, t_lo, t_hi);
    const Vec2 q = a + d * t;
    const double dist = norm(p - q);
    if (dist < best.distance) {
      best.distance = dist;
      best.s = s0 + t * len;
      best.lateral = cross(d, p - a) / len;
    }
  }
  return best;
}

void Polyline::append(const Polyline& other) {
  std::vector<Vec2> pts = points_;
  for (size_t i = 0; i < other.points_.size(); ++i) {
    if (i == 0 && !pts.empty() && norm(pts.back() - other.points_[0]) < 1e-9) continue;
    pts.push_back(other.points_[i]);
  }
  *this = Polyline(std::move(pts));
}

}  // namespace fusiondrive::sim
