#include "simworld/town.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace fusiondrive::sim {
namespace {

constexpr int kArcSteps = 12;

int rank(SemanticClass c) {
  switch (c) {
    case SemanticClass::kLane:
    case SemanticClass::kRoadLine: return 2;
    case SemanticClass::kSidewalk: return 1;
    default: return 0;
  }
}

void merge(SurfaceSample& into, SemanticClass c) {
  if (rank(c) > rank(into.label) ||
      (c == SemanticClass::kRoadLine && into.label == SemanticClass::kLane)) {
    into.label = c;
  }
}

size_t nearest_index(const std::vector<double>& v, double x) {
  size_t best = 0;
  for (size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i] - x) < std::abs(v[best] - x)) best = i;
  return best;
}

}  // namespace

std::string_view to_string(TownId id) {
  return id == TownId::kTrain ? "train_town" : "test_town";
}

TownId town_id_from_string(std::string_view s) {
  if (s == "train_town") return TownId::kTrain;
  if (s == "test_town") return TownId::kTest;
  throw Error(ErrorCode::kInvalidArgument, "unknown town: " + std::string(s));
}

TownMap::TownMap(TownId id, GridLayout layout, RoadGeometry geometry)
    : id_(id), layout_(std::move(layout)), geometry_(geometry) {
  const size_t nx = layout_.xs.size();
  const size_t ny = layout_.ys.size();
  if (nx < 2 || ny < 1 || layout_.horizontal.size() != ny ||
      layout_.vertical.size() != nx)
    throw Error(ErrorCode::kInvalidArgument, "malformed grid layout");
  for (const auto& row : layout_.horizontal)
    if (row.size() != nx - 1) throw Error(ErrorCode::kInvalidArgument, "malformed grid layout");
  for (const auto& col : layout_.vertical)
    if (col.size() != (ny > 0 ? ny - 1 : 0))
      throw Error(ErrorCode::kInvalidArgument, "malformed grid layout");
  build_lane_graph();
}

bool TownMap::has_horizontal(int i, int j) const {
  if (j < 0 || j >= static_cast<int>(layout_.ys.size())) return false;
  if (i < 0 || i >= static_cast<int>(layout_.xs.size()) - 1) return false;
  return layout_.horizontal[j][i];
}

bool TownMap::has_vertical(int i, int j) const {
  if (i < 0 || i >= static_cast<int>(layout_.xs.size())) return false;
  if (j < 0 || j >= static_cast<int>(layout_.ys.size()) - 1) return false;
  return layout_.vertical[i][j];
}

Vec2 TownMap::node_position(int node) const {
  const int nx = static_cast<int>(layout_.xs.size());
  return {layout_.xs[node % nx], layout_.ys[node / nx]};
}

int TownMap::node_degree(int node) const {
  const int nx = static_cast<int>(layout_.xs.size());
  const int i = node % nx;
  const int j = node / nx;
  return has_horizontal(i, j) + has_horizontal(i - 1, j) + has_vertical(i, j) +
         has_vertical(i, j - 1);
}

int TownMap::road_count() const {
  int n = 0;
  for (const auto& row : layout_.horizontal) n += static_cast<int>(std::count(row.begin(), row.end(), true));
  for (const auto& col : layout_.vertical) n += static_cast<int>(std::count(col.begin(), col.end(), true));
  return n;
}

double TownMap::total_road_length() const {
  double total = 0.0;
  for (size_t j = 0; j < layout_.ys.size(); ++j)
    for (size_t i = 0; i + 1 < layout_.xs.size(); ++i)
      if (layout_.horizontal[j][i]) total += layout_.xs[i + 1] - layout_.xs[i];
  for (size_t i = 0; i < layout_.xs.size(); ++i)
    for (size_t j = 0; j + 1 < layout_.ys.size(); ++j)
      if (layout_.vertical[i][j]) total += layout_.ys[j + 1] - layout_.ys[j];
  return total;
}

int TownMap::add_segment(LaneSegment seg) {
  seg.id = static_cast<int>(segments_.size());
  segments_.push_back(std::move(seg));
  return segments_.back().id;
}

void TownMap::build_lane_graph() {
  const int nx = static_cast<int>(layout_.xs.size());
  const int ny = static_cast<int>(layout_.ys.size());
  const double lw = geometry_.lane_width;
  const double margin = geometry_.junction_margin();

  auto add_lane = [&](int a, int b) {
    const Vec2 pa = node_position(a);
    const Vec2 pb = node_position(b);
    const Vec2 d = pb - pa;
    const Vec2 u = d * (1.0 / norm(d));
    const Vec2 offset = right_of(u) * (0.5 * lw);
    LaneSegment seg;
    seg.kind = SegmentKind::kLane;
    seg.from_node = a;
    seg.to_node = b;
    seg.path = Polyline({pa + u * margin + offset, pb - u * margin + offset});
    add_segment(std::move(seg));
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i)
      if (has_horizontal(i, j)) {
        add_lane(node_index(i, j), node_index(i + 1, j));
        add_lane(node_index(i + 1, j), node_index(i, j));
      }
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j + 1 < ny; ++j)
      if (has_vertical(i, j)) {
        add_lane(node_index(i, j), node_index(i, j + 1));
        add_lane(node_index(i, j + 1), node_index(i, j));
      }

  const size_t lane_count = segments_.size();
  for (int node = 0; node < node_count(); ++node) {
    const int degree = node_degree(node);
    if (degree == 0) continue;
    Intersection junction{node, node_position(node), degree, {}};
    for (size_t in = 0; in < lane_count; ++in) {
      if (segments_[in].to_node != node) continue;
      for (size_t out = 0; out < lane_count; ++out) {
        if (segments_[out].from_node != node) continue;
        if (segments_[out].to_node == segments_[in].from_node) continue;  // no U-turns

        const Polyline& in_path = segments_[in].path;
        const Polyline& out_path = segments_[out].path;
        const Vec2 p0 = in_path.points().back();
        const Vec2 p1 = out_path.points().front();
        const Vec2 u_in = heading_vector(in_path.heading_at(in_path.length()));
        const Vec2 u_out = heading_vector(out_path.heading_at(0.0));
        const Vec2 r_in = right_of(u_in);

        NavCommand turn;
        std::vector<Vec2> pts;
        if (dot(u_in, u_out) > 0.5) {
          turn = NavCommand::kStraight;
          pts = {p0, p1};
        } else if (dot(u_out, r_in) > 0.5) {
          turn = NavCommand::kTurnRight;
          const double radius = geometry_.right_turn_radius;
          const Vec2 c = p0 + r_in * radius;
          for (int k = 0; k <= kArcSteps; ++k) {
            const double phi = 0.5 * std::numbers::pi * k / kArcSteps;
            pts.push_back(c - r_in * (radius * std::cos(phi)) + u_in * (radius * std::sin(phi)));
          }
        } else {
          turn = NavCommand::kTurnLeft;
          const double radius = margin + 0.5 * lw;
          const Vec2 c = p0 - r_in * radius;
          for (int k = 0; k <= kArcSteps; ++k) {
            const double phi = 0.5 * std::numbers::pi * k / kArcSteps;
            pts.push_back(c + r_in * (radius * std::cos(phi)) + u_in * (radius * std::sin(phi)));
          }
        }
        pts.front() = p0;
        pts.back() = p1;

        LaneSegment conn;
        conn.kind = SegmentKind::kConnector;
        conn.from_node = node;
        conn.to_node = node;
        conn.maneuver = degree >= 3 ? turn : NavCommand::kLaneFollow;
        conn.path = Polyline(std::move(pts));
        conn.predecessors = {static_cast<int>(in)};
        conn.successors = {static_cast<int>(out)};
        const int id = add_segment(std::move(conn));
        segments_[in].successors.push_back(id);
        segments_[out].predecessors.push_back(id);
        if (degree >= 3) junction.exits.emplace_back(id, turn);
      }
    }
    if (degree >= 3) intersections_.push_back(std::move(junction));
  }
}

SurfaceSample TownMap::classify(Vec2 p) const {
  SurfaceSample out;
  const double hr = geometry_.road_half_width();
  const double sw = geometry_.sidewalk_width;
  const double rf = geometry_.curb_fillet_radius;
  const int nx = static_cast<int>(layout_.xs.size());
  const int ny = static_cast<int>(layout_.ys.size());
  const int i = static_cast<int>(nearest_index(layout_.xs, p.x));
  const int j = static_cast<int>(nearest_index(layout_.ys, p.y));

  // Straight road strip: lateral offset from the centerline, position along
  // the span and the span length decide lane / line / sidewalk.
  auto strip = [&](double lateral, double along, double span) {
    const double a = std::abs(lateral);
    if (a > hr + sw) return;
    if (a > hr) {
      merge(out, SemanticClass::kSidewalk);
      return;
    }
    bool line = false;
    if (along >= hr && along <= span - hr) {
      if (a <= geometry_.line_half_width &&
          std::fmod(along, geometry_.dash_period) < geometry_.dash_length)
        line = true;
      if (a >= hr - 0.35 && a <= hr - 0.15) line = true;
    }
    merge(out, line ? SemanticClass::kRoadLine : SemanticClass::kLane);
  };

  // Vertical road through column i.
  if (ny > 1) {
    const int j0 = (p.y >= layout_.ys[j] || j == 0) ? std::min(j, ny - 2) : j - 1;
    if (p.y >= layout_.ys[j0] && p.y <= layout_.ys[j0 + 1] && has_vertical(i, j0))
      strip(p.x - layout_.xs[i], p.y - layout_.ys[j0], layout_.ys[j0 + 1] - layout_.ys[j0]);
  }
  // Horizontal road through row j.
  {
    const int i0 = (p.x >= layout_.xs[i] || i == 0) ? std::min(i, nx - 2) : i - 1;
    if (p.x >= layout_.xs[i0] && p.x <= layout_.xs[i0 + 1] && has_horizontal(i0, j))
      strip(p.y - layout_.ys[j], p.x - layout_.xs[i0], layout_.xs[i0 + 1] - layout_.xs[i0]);
  }
  // Junction square, its sidewalk ring and the rounded curbs.
  const int node = node_index(i, j);
  if (node_degree(node) > 0) {
    const double dx = p.x - layout_.xs[i];
    const double dy = p.y - layout_.ys[j];
    const double ax = std::abs(dx);
    const double ay = std::abs(dy);
    if (ax <= hr && ay <= hr) {
      merge(out, SemanticClass::kLane);
    } else if (ax <= hr + sw && ay <= hr + sw) {
      merge(out, SemanticClass::kSidewalk);
    }
    const int sx = dx >= 0 ? 1 : -1;
    const int sy = dy >= 0 ? 1 : -1;
    const bool road_x = sx > 0 ? has_horizontal(i, j) : has_horizontal(i - 1, j);
    const bool road_y = sy > 0 ? has_vertical(i, j) : has_vertical(i, j - 1);
    if (road_x && road_y && ax >= hr && ay >= hr && ax <= hr + rf && ay <= hr + rf) {
      const double d = std::hypot(ax - (hr + rf), ay - (hr + rf));
      if (d >= rf) {
        merge(out, SemanticClass::kLane);
      } else if (d >= rf - sw) {
        merge(out, SemanticClass::kSidewalk);
      }
    }
  }
  out.on_road = out.label == SemanticClass::kLane || out.label == SemanticClass::kRoadLine;
  return out;
}

std::optional<TownMap::LanePoint> TownMap::locate(Vec2 p, std::optional<double> heading,
                                                  bool lanes_only) const {
  std::optional<LanePoint> best;
  for (const LaneSegment& seg : segments_) {
    if (lanes_only && seg.kind != SegmentKind::kLane) continue;
    const auto proj = seg.path.project(p);
    if (heading) {
      const double diff = wrap_angle(seg.path.heading_at(proj.s) - *heading);
      if (std::abs(diff) > deg2rad(60.0)) continue;
    }
    if (!best || proj.distance < best->distance) best = LanePoint{seg.id, proj.s, proj.distance};
  }
  return best;
}

namespace {

struct TownRecipe {
  uint64_t seed;
  int nx;
  int ny;
  double dx_lo, dx_hi;
  double dy_lo, dy_hi;
  int removals;
};

bool layout_valid(const GridLayout& g) {
  const int nx = static_cast<int>(g.xs.size());
  const int ny = static_cast<int>(g.ys.size());
  std::vector<int> degree(nx * ny, 0);
  std::vector<std::vector<int>> adj(nx * ny);
  auto link = [&](int a, int b) {
    ++degree[a];
    ++degree[b];
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i)
      if (g.horizontal[j][i]) link(j * nx + i, j * nx + i + 1);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j + 1 < ny; ++j)
      if (g.vertical[i][j]) link(j * nx + i, (j + 1) * nx + i);
  int start = -1;
  int used = 0;
  for (int n = 0; n < nx * ny; ++n) {
    if (degree[n] == 1) return false;
    if (degree[n] > 0) {
      ++used;
      start = n;
    }
  }
  if (start < 0) return false;
  std::vector<bool> seen(nx * ny, false);
  std::vector<int> stack{start};
  seen[start] = true;
  int reached = 0;
  while (!stack.empty()) {
    const int n = stack.back();
    stack.pop_back();
    ++reached;
    for (int m : adj[n])
      if (!seen[m]) {
        seen[m] = true;
        stack.push_back(m);
      }
  }
  return reached == used;
}

GridLayout generate_layout(const TownRecipe& r) {
  Rng rng(r.seed);
  GridLayout g;
  double x = 0.0;
  for (int i = 0; i < r.nx; ++i) {
    g.xs.push_back(x);
    x += std::round(rng.uniform(r.dx_lo, r.dx_hi));
  }
  double y = 0.0;
  for (int j = 0; j < r.ny; ++j) {
    g.ys.push_back(y);
    y += std::round(rng.uniform(r.dy_lo, r.dy_hi));
  }
  g.horizontal.assign(r.ny, std::vector<bool>(r.nx - 1, true));
  g.vertical.assign(r.nx, std::vector<bool>(r.ny - 1, true));

  // Candidate removals in a seeded order; keep a removal only if the grid
  // stays connected without dead ends.
  struct EdgeRef { bool horizontal; int a; int b; };
  std::vector<EdgeRef> edges;
  for (int j = 0; j < r.ny; ++j)
    for (int i = 0; i + 1 < r.nx; ++i) edges.push_back({true, j, i});
  for (int i = 0; i < r.nx; ++i)
    for (int j = 0; j + 1 < r.ny; ++j) edges.push_back({false, i, j});
  for (size_t k = edges.size(); k > 1; --k)
    std::swap(edges[k - 1], edges[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(k) - 1))]);

  int removed = 0;
  for (const EdgeRef& e : edges) {
    if (removed == r.removals) break;
    auto slot = e.horizontal ? g.horizontal[e.a].begin() + e.b : g.vertical[e.a].begin() + e.b;
    *slot = false;
    if (layout_valid(g)) {
      ++removed;
    } else {
      *slot = true;
    }
  }
  return g;
}

}  // namespace

TownMap make_town(TownId id) {
  const TownRecipe recipe = id == TownId::kTrain
                                ? TownRecipe{0x5EED0001, 5, 4, 60.0, 80.0, 55.0, 75.0, 4}
                                : TownRecipe{0x5EED0002, 4, 3, 50.0, 65.0, 50.0, 62.0, 2};
  return TownMap(id, generate_layout(recipe));
}

const TownMap& builtin_town(TownId id) {
  static const TownMap train = make_town(TownId::kTrain);
  static const TownMap test = make_town(TownId::kTest);
  return id == TownId::kTrain ? train : test;
}

}  // namespace fusiondrive::sim
