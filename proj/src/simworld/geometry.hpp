#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace fusiondrive::sim {

// Ground frame convention: +y lies to the right of +x, so a positive heading
// change is a right turn and a positive steer produces one.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 heading_vector(double heading) { return {std::cos(heading), std::sin(heading)}; }
/// Rotation by +90 degrees: the right-hand side of a direction.
inline Vec2 right_of(Vec2 d) { return {-d.y, d.x}; }

/// Wraps to (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  a = std::fmod(a, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  if (a > std::numbers::pi) a -= kTwoPi;
  return a;
}

constexpr double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
constexpr double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  Vec2 position() const { return {x, y}; }
  bool operator==(const Pose&) const = default;
};

/// Footprint rectangle centered at `center` with its long axis along heading.
struct OrientedBox {
  Vec2 center;
  double heading = 0.0;
  double half_length = 0.0;
  double half_width = 0.0;
};

bool boxes_overlap(const OrientedBox& a, const OrientedBox& b);
/// Euclidean distance from a point to the box (0 inside).
double point_box_distance(Vec2 p, const OrientedBox& box);

/// Arc-length parameterized polyline.
class Polyline {
 public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> points);

  const std::vector<Vec2>& points() const { return points_; }
  double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  bool empty() const { return points_.size() < 2; }

  /// Position at arc length s; s is extrapolated linearly beyond both ends.
  Vec2 position_at(double s) const;
  double heading_at(double s) const;

  struct Projection {
    double s = 0.0;
    double lateral = 0.0;  // positive: point lies right of the path
    double distance = 0.0;
  };
  /// Closest point, restricted to arc lengths within [s_min, s_max].
  Projection project(Vec2 p, double s_min, double s_max) const;
  Projection project(Vec2 p) const { return project(p, 0.0, length()); }

  void append(const Polyline& other);

 private:
  size_t segment_index(double s) const;

  std::vector<Vec2> points_;
  std::vector<double> cumulative_;
};

}  // namespace fusiondrive::sim
