#include "simworld/renderer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace fusiondrive::sim {
namespace {

struct Vec3 {
  double x, y, z;
};

using Color = std::array<double, 3>;

struct Palette {
  Color lane, line, sidewalk, other;
  std::array<Color, 6> vehicles;
  std::array<Color, 4> pedestrians;
};

const Palette& palette(int id) {
  static const Palette kTrain{
      {0.33, 0.33, 0.35}, {0.92, 0.92, 0.88}, {0.62, 0.58, 0.52}, {0.30, 0.48, 0.24},
      {{{0.75, 0.12, 0.10}, {0.12, 0.25, 0.70}, {0.85, 0.85, 0.82}, {0.10, 0.10, 0.12},
        {0.80, 0.65, 0.15}, {0.20, 0.55, 0.35}}},
      {{{0.85, 0.45, 0.20}, {0.30, 0.20, 0.55}, {0.90, 0.75, 0.60}, {0.20, 0.60, 0.75}}}};
  static const Palette kTest{
      {0.42, 0.40, 0.37}, {0.95, 0.82, 0.35}, {0.72, 0.69, 0.63}, {0.55, 0.44, 0.33},
      {{{0.60, 0.10, 0.30}, {0.20, 0.45, 0.80}, {0.70, 0.72, 0.75}, {0.25, 0.22, 0.20},
        {0.95, 0.55, 0.10}, {0.35, 0.40, 0.20}}},
      {{{0.95, 0.25, 0.25}, {0.15, 0.35, 0.30}, {0.80, 0.80, 0.40}, {0.50, 0.30, 0.70}}}};
  return id == 0 ? kTrain : kTest;
}

Color class_color(const Palette& pal, SemanticClass c) {
  switch (c) {
    case SemanticClass::kLane: return pal.lane;
    case SemanticClass::kRoadLine: return pal.line;
    case SemanticClass::kSidewalk: return pal.sidewalk;
    default: return pal.other;
  }
}

// Bilinear value noise on a unit lattice, in [0, 1).
double value_noise(uint64_t seed, double x, double y) {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const auto ix = static_cast<int64_t>(fx);
  const auto iy = static_cast<int64_t>(fy);
  const double tx = x - fx;
  const double ty = y - fy;
  auto h = [seed](int64_t a, int64_t b) {
    return hash_unit(seed, static_cast<uint64_t>(a), static_cast<uint64_t>(b));
  };
  const double top = h(ix, iy) * (1 - tx) + h(ix + 1, iy) * tx;
  const double bottom = h(ix, iy + 1) * (1 - tx) + h(ix + 1, iy + 1) * tx;
  return top * (1 - ty) + bottom * ty;
}

struct AgentBox {
  Vec2 center;
  Vec2 forward;
  double half_length, half_width, height;
  Color color;
};

// Ray/box slab test in the box frame; returns entry distance in ray units.
double ray_box(const Vec3& o, const Vec3& d, const AgentBox& b) {
  const Vec2 right = right_of(b.forward);
  const Vec2 rel{o.x - b.center.x, o.y - b.center.y};
  const double lo[3] = {dot(rel, b.forward), dot(rel, right), o.z};
  const double ld[3] = {b.forward.x * d.x + b.forward.y * d.y, right.x * d.x + right.y * d.y, d.z};
  const double lo_b[3] = {-b.half_length, -b.half_width, 0.0};
  const double hi_b[3] = {b.half_length, b.half_width, b.height};
  double t0 = 0.0;
  double t1 = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (std::abs(ld[a]) < 1e-12) {
      if (lo[a] < lo_b[a] || lo[a] > hi_b[a]) return std::numeric_limits<double>::infinity();
      continue;
    }
    double ta = (lo_b[a] - lo[a]) / ld[a];
    double tb = (hi_b[a] - lo[a]) / ld[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::numeric_limits<double>::infinity();
  }
  return t0;
}

struct CameraFrame {
  Vec3 origin;
  Vec3 forward, right, up;
  double focal;
  double cx, cy;

  Vec3 ray(double u, double v) const {
    const double xr = (u - cx) / focal;
    const double yr = (v - cy) / focal;
    return {forward.x + xr * right.x - yr * up.x, forward.y + xr * right.y - yr * up.y,
            forward.z + xr * right.z - yr * up.z};
  }
};

CameraFrame camera_frame(const CameraConfig& cam, Vec2 position, double heading) {
  const double p = deg2rad(cam.pitch);
  const Vec2 f = heading_vector(heading);
  const Vec2 r = right_of(f);
  CameraFrame c;
  c.origin = {position.x, position.y, cam.mount_height};
  c.forward = {std::cos(p) * f.x, std::cos(p) * f.y, std::sin(p)};
  c.up = {-std::sin(p) * f.x, -std::sin(p) * f.y, std::cos(p)};
  c.right = {r.x, r.y, 0.0};
  c.focal = 0.5 * cam.image_width / std::tan(0.5 * deg2rad(cam.horizontal_fov));
  c.cx = 0.5 * cam.image_width;
  c.cy = 0.5 * cam.image_height;
  return c;
}

double length(const Vec3& v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

// Pixel rectangle that can contain the box, or false when it is off-screen.
bool screen_bounds(const CameraFrame& c, const CameraConfig& cam, const AgentBox& b,
                   int& u0, int& u1, int& v0, int& v1) {
  const Vec2 r = right_of(b.forward);
  double umin = 1e300, umax = -1e300, vmin = 1e300, vmax = -1e300;
  bool behind = false;
  bool in_front = false;
  for (int sx = -1; sx <= 1; sx += 2)
    for (int sy = -1; sy <= 1; sy += 2)
      for (int sz = 0; sz <= 1; ++sz) {
        const Vec2 g = b.center + b.forward * (sx * b.half_length) + r * (sy * b.half_width);
        const Vec3 rel{g.x - c.origin.x, g.y - c.origin.y, sz * b.height - c.origin.z};
        const double zf = rel.x * c.forward.x + rel.y * c.forward.y + rel.z * c.forward.z;
        if (zf <= 1e-3) {
          behind = true;
          continue;
        }
        in_front = true;
        const double xr = rel.x * c.right.x + rel.y * c.right.y + rel.z * c.right.z;
        const double yu = rel.x * c.up.x + rel.y * c.up.y + rel.z * c.up.z;
        const double u = c.cx + c.focal * xr / zf;
        const double v = c.cy - c.focal * yu / zf;
        umin = std::min(umin, u);
        umax = std::max(umax, u);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
      }
  if (!in_front) return false;
  if (behind) {
    // Straddles the image plane: fall back to the whole image.
    u0 = 0;
    v0 = 0;
    u1 = cam.image_width - 1;
    v1 = cam.image_height - 1;
    return true;
  }
  u0 = std::max(0, static_cast<int>(std::floor(umin)) - 1);
  v0 = std::max(0, static_cast<int>(std::floor(vmin)) - 1);
  u1 = std::min(cam.image_width - 1, static_cast<int>(std::ceil(umax)) + 1);
  v1 = std::min(cam.image_height - 1, static_cast<int>(std::ceil(vmax)) + 1);
  return u0 <= u1 && v0 <= v1;
}

}  // namespace

double ground_ray_distance(const CameraConfig& cam, double u, double v) {
  const CameraFrame c = camera_frame(cam, {0.0, 0.0}, 0.0);
  const Vec3 d = c.ray(u, v);
  if (d.z >= 0.0) return std::numeric_limits<double>::infinity();
  return cam.mount_height / -d.z * length(d);
}

Observation render_observation(const TownMap& town, const WorldState& state,
                               const CameraConfig& cam) {
  if (cam.image_width <= 0 || cam.image_height <= 0 || !(cam.far_plane > 0.0) ||
      !(cam.horizontal_fov > 0.0 && cam.horizontal_fov < 180.0))
    throw Error(ErrorCode::kInvalidArgument, "invalid camera configuration");

  const int w = cam.image_width;
  const int h = cam.image_height;
  const Vec2 mount = state.ego.position() + heading_vector(state.ego.heading) * state.ego.half_length;
  const CameraFrame c = camera_frame(cam, mount, state.ego.heading);
  const Palette& pal = palette(town.palette());
  const WeatherParams& weather = state.weather;
  const uint64_t tex_seed = town.texture_seed();

  Observation obs{ImageF(w, h, 3), ImageF(w, h, 1, 1.0f),
                  LabelImage(w, h, 1, static_cast<uint8_t>(SemanticClass::kOther))};
  std::vector<double> hit(static_cast<size_t>(w) * h, std::numeric_limits<double>::infinity());

  // Ground pass.
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const Vec3 d = c.ray(u + 0.5, v + 0.5);
      Color col = weather.sky;
      if (d.z < 0.0) {
        const double t = c.origin.z / -d.z;
        const Vec2 g{c.origin.x + t * d.x, c.origin.y + t * d.y};
        const double dist = t * length(d);
        const SemanticClass label = town.classify(g).label;
        col = class_color(pal, label);
        const double n = hash_unit(tex_seed, static_cast<uint64_t>(static_cast<int64_t>(std::floor(g.x * 4.0))),
                                   static_cast<uint64_t>(static_cast<int64_t>(std::floor(g.y * 4.0))));
        const double noise = (n - 0.5) * 3.4641016151377544 * weather.texture_noise_sigma;
        for (double& ch : col) ch += noise;
        if (weather.ground_gloss > 0.0 &&
            (label == SemanticClass::kLane || label == SemanticClass::kRoadLine)) {
          const double puddle = value_noise(tex_seed ^ 0xD1CEULL, g.x / 3.0, g.y / 3.0);
          if (puddle > 1.0 - 0.45 * weather.ground_gloss) {
            for (int k = 0; k < 3; ++k) col[k] = 0.4 * col[k] + 0.6 * weather.sky[k] + 0.15;
          }
        }
        obs.semantic.at(u, v) = static_cast<uint8_t>(label);
        obs.depth.at(u, v) = static_cast<float>(std::min(dist, cam.far_plane) / cam.far_plane);
        hit[static_cast<size_t>(v) * w + u] = dist;
      }
      for (int k = 0; k < 3; ++k)
        obs.rgb.at(u, v, k) = static_cast<float>(std::clamp(col[k] * weather.tint[k], 0.0, 1.0));
    }
  }

  // Agent pass.
  std::vector<AgentBox> boxes;
  const double reach = cam.far_plane + 10.0;
  auto add = [&](const VehicleState& s, double height, Color color) {
    if (norm(s.position() - mount) > reach) return;
    boxes.push_back({s.position(), heading_vector(s.heading), s.half_length, s.half_width, height, color});
  };
  for (const auto& v : state.traffic_vehicles)
    add(v.state, kVehicleHeight, pal.vehicles[v.color_id % pal.vehicles.size()]);
  for (const auto& p : state.pedestrians)
    add(p.state, kPedestrianHeight, pal.pedestrians[p.color_id % pal.pedestrians.size()]);

  for (const AgentBox& b : boxes) {
    int u0, u1, v0, v1;
    if (!screen_bounds(c, cam, b, u0, u1, v0, v1)) continue;
    for (int v = v0; v <= v1; ++v) {
      for (int u = u0; u <= u1; ++u) {
        const Vec3 d = c.ray(u + 0.5, v + 0.5);
        const double t = ray_box(c.origin, d, b);
        if (!std::isfinite(t)) continue;
        const double dist = t * length(d);
        double& best = hit[static_cast<size_t>(v) * w + u];
        if (dist >= best) continue;
        best = dist;
        const double n = hash_unit(tex_seed, static_cast<uint64_t>(u), static_cast<uint64_t>(v));
        const double shade = 0.85 + 0.15 * std::clamp(d.z + 1.0, 0.0, 1.0) +
                             (n - 0.5) * 3.4641016151377544 * weather.texture_noise_sigma;
        for (int k = 0; k < 3; ++k)
          obs.rgb.at(u, v, k) =
              static_cast<float>(std::clamp(b.color[k] * shade * weather.tint[k], 0.0, 1.0));
        obs.semantic.at(u, v) = static_cast<uint8_t>(SemanticClass::kVehicleOrPedestrian);
        obs.depth.at(u, v) = static_cast<float>(std::min(dist, cam.far_plane) / cam.far_plane);
      }
    }
  }
  return obs;
}

}  // namespace fusiondrive::sim
