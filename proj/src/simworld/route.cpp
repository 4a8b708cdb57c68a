#include "simworld/route.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "common/error.hpp"

namespace fusiondrive::sim {
namespace {

std::vector<Vec2> slice(const Polyline& path, double a, double b) {
  std::vector<Vec2> pts{path.position_at(a)};
  const auto& src = path.points();
  double s = 0.0;
  for (size_t i = 0; i < src.size(); ++i) {
    if (i > 0) s += norm(src[i] - src[i - 1]);
    if (s > a + 1e-9 && s < b - 1e-9) pts.push_back(src[i]);
  }
  pts.push_back(path.position_at(b));
  return pts;
}

}  // namespace

RouteSpec plan_route(const TownMap& town, const Pose& start, Vec2 goal, double activation_radius) {
  const double tolerance = town.lane_width();
  const auto from = town.locate(start.position(), start.heading);
  if (!from || from->distance > tolerance)
    throw Error(ErrorCode::kInvalidArgument, "route start is not on a mapped lane");
  const auto to = town.locate(goal);
  if (!to || to->distance > tolerance)
    throw Error(ErrorCode::kInvalidArgument, "route goal is not on a mapped lane");

  std::vector<int> chain;
  if (from->segment == to->segment && to->s >= from->s) {
    chain = {from->segment};
  } else {
    const size_t n = town.segments().size();
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<int> parent(n, -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    const double first_cost = town.segment(from->segment).path.length() - from->s;
    for (int succ : town.segment(from->segment).successors) {
      if (first_cost < dist[succ]) {
        dist[succ] = first_cost;
        parent[succ] = from->segment;
        open.emplace(first_cost, succ);
      }
    }
    bool found = false;
    while (!open.empty()) {
      const auto [d, id] = open.top();
      open.pop();
      if (d > dist[id]) continue;
      if (id == to->segment) {
        found = true;
        break;
      }
      const double through = d + town.segment(id).path.length();
      for (int succ : town.segment(id).successors) {
        if (through < dist[succ]) {
          dist[succ] = through;
          parent[succ] = id;
          open.emplace(through, succ);
        }
      }
    }
    if (!found) throw Error(ErrorCode::kUnreachableGoal, "goal is unreachable from start");
    for (int id = to->segment; id != from->segment || chain.empty(); id = parent[id]) {
      chain.push_back(id);
      if (id == from->segment) break;
    }
    if (chain.back() != from->segment) chain.push_back(from->segment);
    std::reverse(chain.begin(), chain.end());
  }

  RouteSpec route;
  route.start_pose = start;
  route.goal = goal;
  route.activation_radius = activation_radius;
  route.waypoints = chain;
  Polyline path;
  double offset = 0.0;
  for (size_t k = 0; k < chain.size(); ++k) {
    const LaneSegment& seg = town.segment(chain[k]);
    const double a = k == 0 ? from->s : 0.0;
    const double b = k + 1 == chain.size() ? to->s : seg.path.length();
    path.append(Polyline(slice(seg.path, a, b)));
    route.segment_spans.emplace_back(offset, offset + (b - a));
    offset += b - a;
    route.per_segment_command.push_back(seg.kind == SegmentKind::kConnector ? seg.maneuver
                                                                            : NavCommand::kLaneFollow);
  }
  route.path = std::move(path);
  if (!(route.length() > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "route has zero length");
  return route;
}

NavCommand command_at(const RouteSpec& route, double s) {
  for (size_t k = 0; k < route.waypoints.size(); ++k) {
    const NavCommand c = route.per_segment_command[k];
    if (c == NavCommand::kLaneFollow) continue;
    const auto [begin, end] = route.segment_spans[k];
    if (s >= begin - route.activation_radius && s <= end) return c;
  }
  return NavCommand::kLaneFollow;
}

int route_turn_count(const TownMap& town, const RouteSpec& route) {
  int turns = 0;
  for (int id : route.waypoints) {
    const LaneSegment& seg = town.segment(id);
    if (seg.kind != SegmentKind::kConnector) continue;
    const double change = wrap_angle(seg.path.heading_at(seg.path.length()) - seg.path.heading_at(0.0));
    if (std::abs(change) > deg2rad(45.0)) ++turns;
  }
  return turns;
}

RouteSpec sample_route(const TownMap& town, RouteKind kind, Rng& rng, double min_navigation_length) {
  std::vector<int> lanes;
  for (const auto& seg : town.segments())
    if (seg.kind == SegmentKind::kLane) lanes.push_back(seg.id);
  if (lanes.empty()) throw Error(ErrorCode::kInvalidArgument, "town has no lanes");
  auto pick = [&rng](const std::vector<int>& ids) {
    return ids[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(ids.size()) - 1))];
  };
  auto is_turn = [&town](int id) {
    const Polyline& p = town.segment(id).path;
    return std::abs(wrap_angle(p.heading_at(p.length()) - p.heading_at(0.0))) > deg2rad(45.0);
  };

  for (int attempt = 0; attempt < 1000; ++attempt) {
    const int first = pick(lanes);
    const Polyline& first_path = town.segment(first).path;
    const double s0 = rng.uniform(0.05, 0.3) * first_path.length();
    const Pose start{first_path.position_at(s0).x, first_path.position_at(s0).y,
                     wrap_angle(first_path.heading_at(s0))};
    Vec2 goal;
    if (kind == RouteKind::kNavigation) {
      const int last = pick(lanes);
      const Polyline& lp = town.segment(last).path;
      goal = lp.position_at(rng.uniform(0.3, 0.8) * lp.length());
    } else {
      // Walk the lane graph along straight connectors, plus one turn when asked.
      int current = first;
      const int crossings = static_cast<int>(rng.uniform_int(0, 1));
      bool turned = kind == RouteKind::kStraight;
      int straight_left = crossings;
      bool ok = true;
      for (;;) {
        std::vector<int> straight, turning;
        for (int c : town.segment(current).successors) (is_turn(c) ? turning : straight).push_back(c);
        if (!turned) {
          if (turning.empty()) { ok = false; break; }
          current = town.segment(pick(turning)).successors.front();
          turned = true;
          continue;
        }
        if (straight_left == 0 || straight.empty()) break;
        current = town.segment(pick(straight)).successors.front();
        --straight_left;
      }
      if (!ok) continue;
      const Polyline& lp = town.segment(current).path;
      double s1 = rng.uniform(0.4, 0.8) * lp.length();
      if (current == first) {
        const double lo = std::max(s0 + 25.0, 0.6 * lp.length());
        if (lo >= 0.95 * lp.length()) continue;
        s1 = rng.uniform(lo, 0.95 * lp.length());
      }
      goal = lp.position_at(s1);
    }
    RouteSpec route;
    try {
      route = plan_route(town, start, goal);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kUnreachableGoal || e.code() == ErrorCode::kInvalidArgument) continue;
      throw;
    }
    const int turns = route_turn_count(town, route);
    if (kind == RouteKind::kStraight && (turns != 0 || route.length() < 25.0)) continue;
    if (kind == RouteKind::kOneTurn && turns != 1) continue;
    if (kind == RouteKind::kNavigation && route.length() < min_navigation_length) continue;
    return route;
  }
  throw Error(ErrorCode::kInternal, "could not sample a route of the requested kind");
}

Polyline::Projection RouteTracker::update(Vec2 position) {
  const auto proj = route_->path.project(position, std::max(0.0, s_ - 3.0), s_ + 8.0);
  s_ = std::max(s_, proj.s);
  return proj;
}

}  // namespace fusiondrive::sim
