#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "simworld/autopilot.hpp"
#include "simworld/collision.hpp"
#include "simworld/renderer.hpp"
#include "simworld/route.hpp"
#include "simworld/town.hpp"
#include "simworld/world.hpp"
#include "support/expect_error.hpp"

using namespace fusiondrive;
using namespace fusiondrive::sim;

namespace {

const TownMap& train_town() { return builtin_town(TownId::kTrain); }

// The longest lane of the town; lanes are straight.
const LaneSegment& longest_lane(const TownMap& town) {
  const LaneSegment* best = nullptr;
  for (const auto& seg : town.segments())
    if (seg.kind == SegmentKind::kLane && (!best || seg.path.length() > best->path.length())) best = &seg;
  return *best;
}

Pose pose_on(const LaneSegment& seg, double s) {
  const Vec2 p = seg.path.position_at(s);
  return {p.x, p.y, seg.path.heading_at(s)};
}

WorldState ego_only(const Pose& pose, double speed = 0.0) {
  ScenarioSpec spec;
  spec.weather = weather_by_name("clear_afternoon");
  spec.seed = 1;
  spec.ego_start = pose;
  WorldState w = spawn_scenario(train_town(), spec);
  w.ego.speed = speed;
  return w;
}

TrafficVehicle parked_vehicle(Vec2 center, double heading, int segment) {
  TrafficVehicle v;
  v.state.x = center.x;
  v.state.y = center.y;
  v.state.heading = heading;
  v.segment = segment;
  v.cruise_speed = 0.0;
  return v;
}

CameraConfig small_camera() {
  CameraConfig cam;
  cam.image_width = 160;
  cam.image_height = 120;
  return cam;
}

// Ray through pixel position (u, v) to the ground plane, from the camera
// geometry alone.
double ground_distance_oracle(const CameraConfig& cam, double u, double v) {
  const double pitch = cam.pitch * std::numbers::pi / 180.0;
  const double focal = 0.5 * cam.image_width / std::tan(0.5 * cam.horizontal_fov * std::numbers::pi / 180.0);
  const double xr = (u - 0.5 * cam.image_width) / focal;
  const double yr = (v - 0.5 * cam.image_height) / focal;
  // Camera axes in (forward, right, up) world components with heading 0.
  const double fx = std::cos(pitch) + yr * std::sin(pitch);
  const double fy = xr;
  const double fz = std::sin(pitch) - yr * std::cos(pitch);
  if (fz >= 0.0) return INFINITY;
  return cam.mount_height / -fz * std::sqrt(fx * fx + fy * fy + fz * fz);
}

}  // namespace

TEST(Town, IntersectionsHaveAtLeastTwoExits) {
  for (TownId id : {TownId::kTrain, TownId::kTest}) {
    const TownMap& town = builtin_town(id);
    ASSERT_FALSE(town.intersections().empty());
    for (const auto& junction : town.intersections()) EXPECT_GE(junction.exits.size(), 2u);
  }
}

TEST(Town, LanesConnectEndToStart) {
  for (TownId id : {TownId::kTrain, TownId::kTest}) {
    const TownMap& town = builtin_town(id);
    for (const auto& seg : town.segments()) {
      EXPECT_FALSE(seg.successors.empty()) << "segment " << seg.id;
      for (int next : seg.successors) {
        const Vec2 end = seg.path.points().back();
        const Vec2 start = town.segment(next).path.points().front();
        EXPECT_LT(norm(end - start), 1e-9);
      }
    }
  }
}

TEST(Town, TownsDifferInLayout) {
  const TownMap& a = builtin_town(TownId::kTrain);
  const TownMap& b = builtin_town(TownId::kTest);
  EXPECT_NE(a.segments().size(), b.segments().size());
  EXPECT_NE(a.intersections().size(), b.intersections().size());
  EXPECT_NE(a.palette(), b.palette());
}

TEST(Town, ClassifiesLaneLineAndSidewalk) {
  const TownMap& town = train_town();
  const LaneSegment& lane = longest_lane(town);
  const double mid = 0.5 * lane.path.length();
  const Vec2 p = lane.path.position_at(mid);
  const Vec2 right = right_of(heading_vector(lane.path.heading_at(mid)));
  const double half_lane = 0.5 * town.lane_width();
  EXPECT_EQ(town.classify(p).label, SemanticClass::kLane);
  EXPECT_TRUE(town.classify(p).on_road);
  EXPECT_EQ(town.classify(p + right * (half_lane + 1.5)).label, SemanticClass::kSidewalk);
  EXPECT_FALSE(town.on_road(p + right * (half_lane + 1.5)));
  EXPECT_EQ(town.classify(p + right * (half_lane + 20.0)).label, SemanticClass::kOther);
}

TEST(Weather, Roster) {
  EXPECT_EQ(training_weathers().size(), 4u);
  EXPECT_EQ(all_weathers().size(), 7u);
  for (auto name : all_weathers()) EXPECT_EQ(weather_by_name(name).name, name);
  EXPECT_EQ(training_weathers()[0], "clear_afternoon");
  EXPECT_EQ(training_weathers()[1], "wet_afternoon");
  for (auto name : corl2017_test_weathers())
    EXPECT_EQ(std::count(training_weathers().begin(), training_weathers().end(), name), 0);
  EXPECT_FD_ERROR(weather_by_name("snow"), ErrorCode::kInvalidArgument);
}

TEST(Spawn, FortyVehiclesAndPedestriansWithoutOverlap) {
  ScenarioSpec spec{40, 40, weather_by_name("clear_afternoon"), 7, std::nullopt};
  const WorldState w = spawn_scenario(train_town(), spec);
  ASSERT_EQ(w.traffic_vehicles.size(), 40u);
  ASSERT_EQ(w.pedestrians.size(), 40u);
  std::vector<OrientedBox> boxes{w.ego.box()};
  for (const auto& v : w.traffic_vehicles) boxes.push_back(v.state.box());
  for (const auto& p : w.pedestrians) boxes.push_back(p.state.box());
  for (size_t i = 0; i < boxes.size(); ++i)
    for (size_t j = i + 1; j < boxes.size(); ++j) EXPECT_FALSE(boxes_overlap(boxes[i], boxes[j])) << i << "," << j;
}

TEST(Spawn, EmptyTrafficHasOnlyEgo) {
  ScenarioSpec spec{0, 0, weather_by_name("clear_afternoon"), 7, std::nullopt};
  const WorldState w = spawn_scenario(train_town(), spec);
  EXPECT_TRUE(w.traffic_vehicles.empty());
  EXPECT_TRUE(w.pedestrians.empty());
  EXPECT_TRUE(train_town().on_road(w.ego.position()));
}

TEST(Spawn, DeterministicInSeed) {
  ScenarioSpec spec{10, 10, weather_by_name("wet_sunset"), 7, std::nullopt};
  EXPECT_EQ(spawn_scenario(train_town(), spec), spawn_scenario(train_town(), spec));
  ScenarioSpec other = spec;
  other.seed = 8;
  EXPECT_NE(spawn_scenario(train_town(), spec), spawn_scenario(train_town(), other));
}

TEST(Spawn, OverCapacityIsInfeasible) {
  ScenarioSpec spec{100000, 0, weather_by_name("clear_afternoon"), 7, std::nullopt};
  EXPECT_FD_ERROR(spawn_scenario(train_town(), spec), ErrorCode::kPlacementInfeasible);
  spec.n_vehicles = -1;
  EXPECT_FD_ERROR(spawn_scenario(train_town(), spec), ErrorCode::kInvalidArgument);
}

TEST(Step, StraightLineKinematics) {
  VehicleState ego;
  ego.speed = 2.0;
  const VehicleState next = integrate_ego(ego, {0.0, 0.0, 0.0}, 0.1, {});
  EXPECT_DOUBLE_EQ(next.x, 0.2);
  EXPECT_DOUBLE_EQ(next.y, 0.0);
  EXPECT_DOUBLE_EQ(next.heading, 0.0);
}

TEST(Step, BicycleHeadingChange) {
  VehicleState ego;
  ego.speed = 2.0;
  // 0.1 rad front-wheel angle in normalized steer units.
  const double steer = 0.1 / (70.0 * std::numbers::pi / 180.0);
  const VehicleState next = integrate_ego(ego, {steer, 0.0, 0.0}, 0.1, {});
  EXPECT_NEAR(next.heading, (2.0 / 2.5) * std::tan(0.1) * 0.1, 1e-12);
  EXPECT_NEAR(next.heading, 8.027e-3, 1e-6);
  EXPECT_NEAR(next.yaw_rate, next.heading / 0.1, 1e-12);
}

TEST(Step, ZeroSpeedIsFixedPoint) {
  VehicleState ego;
  ego.x = 3.0;
  ego.y = -2.0;
  ego.heading = 0.7;
  const VehicleState next = integrate_ego(ego, {0.8, 0.0, 0.0}, 0.1, {});
  EXPECT_EQ(next.x, ego.x);
  EXPECT_EQ(next.y, ego.y);
  EXPECT_EQ(next.heading, ego.heading);
  EXPECT_EQ(next.speed, 0.0);
}

TEST(Step, WheelAngleClampsAtPhysicalLimit) {
  const VehicleParams p;
  EXPECT_NEAR(wheel_angle(1.0, p), 35.0 * std::numbers::pi / 180.0, 1e-12);
  EXPECT_NEAR(wheel_angle(-3.0, p), -35.0 * std::numbers::pi / 180.0, 1e-12);
  EXPECT_NEAR(wheel_angle(0.25, p), 17.5 * std::numbers::pi / 180.0, 1e-12);
}

TEST(Step, RejectsNonPositiveDt) {
  const WorldState w = ego_only(pose_on(longest_lane(train_town()), 10.0));
  EXPECT_FD_ERROR(step(train_town(), w, {}, 0.0), ErrorCode::kInvalidArgument);
}

TEST(Step, SpeedStaysWithinBounds) {
  Rng rng(5);
  VehicleState ego;
  for (int i = 0; i < 5000; ++i) {
    ego = integrate_ego(ego, {rng.uniform(-2, 2), rng.uniform(-1, 2), rng.uniform(-1, 2)}, 0.1, {});
    ASSERT_GE(ego.speed, 0.0);
    ASSERT_LE(ego.speed, 10.0);
    ASSERT_GT(ego.heading, -std::numbers::pi);
    ASSERT_LE(ego.heading, std::numbers::pi);
  }
}

// Property: with no throttle and no brake, speed never increases.
TEST(StepProperty, CoastingNeverSpeedsUp) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    VehicleState ego;
    ego.speed = rng.uniform(0.0, 10.0);
    for (int i = 0; i < 200; ++i) {
      const VehicleState next = integrate_ego(ego, {rng.uniform(-1, 1), 0.0, 0.0}, 0.1, {});
      ASSERT_LE(next.speed, ego.speed);
      ego = next;
    }
  }
}

// Property: summing yaw_rate * dt reproduces the heading.
TEST(StepProperty, YawRateReconstructsHeading) {
  Rng rng(12);
  VehicleState ego;
  double integrated = 0.0;
  for (int i = 0; i < 3000; ++i) {
    ego = integrate_ego(ego, {rng.uniform(-1, 1), rng.uniform(0, 1), 0.0}, 0.1, {});
    integrated += ego.yaw_rate * 0.1;
    ASSERT_NEAR(std::remainder(integrated - ego.heading, 2.0 * std::numbers::pi), 0.0, 1e-6 * (i + 1));
  }
}

// Property: same seed and controls give identical states and rasters.
TEST(StepProperty, Deterministic) {
  ScenarioSpec spec{15, 10, weather_by_name("hard_rain_afternoon"), 21, std::nullopt};
  const CameraConfig cam = small_camera();
  auto run = [&]() {
    WorldState w = spawn_scenario(train_town(), spec);
    std::vector<WorldState> states;
    std::vector<Observation> frames;
    Rng controls(3);
    for (int i = 0; i < 150; ++i) {
      w = step(train_town(), w, {controls.uniform(-0.1, 0.1), controls.uniform(0, 0.6), 0.0}, 0.1);
      states.push_back(w);
      if (i % 50 == 0) frames.push_back(render_observation(train_town(), w, cam));
    }
    return std::make_pair(states, frames);
  };
  const auto a = run();
  const auto b = run();
  ASSERT_EQ(a.first, b.first);
  for (size_t i = 0; i < a.second.size(); ++i) {
    EXPECT_EQ(a.second[i].rgb, b.second[i].rgb);
    EXPECT_EQ(a.second[i].depth, b.second[i].depth);
    EXPECT_EQ(a.second[i].semantic, b.second[i].semantic);
  }
}

TEST(Render, BottomCenterPixelIsLaneAtGroundDistance) {
  const LaneSegment& lane = longest_lane(train_town());
  const WorldState w = ego_only(pose_on(lane, 10.0));
  const CameraConfig cam = small_camera();
  const Observation obs = render_observation(train_town(), w, cam);
  const int u = cam.image_width / 2;
  const int v = cam.image_height - 1;
  EXPECT_EQ(obs.semantic.at(u, v), static_cast<uint8_t>(SemanticClass::kLane));
  const double expected = ground_distance_oracle(cam, u + 0.5, v + 0.5) / cam.far_plane;
  EXPECT_NEAR(obs.depth.at(u, v), expected, 1e-6);
  EXPECT_NEAR(ground_ray_distance(cam, u + 0.5, v + 0.5), expected * cam.far_plane, 1e-9);
}

TEST(Render, AboveHorizonIsOtherAtFarPlane) {
  const WorldState w = ego_only(pose_on(longest_lane(train_town()), 10.0));
  const CameraConfig cam = small_camera();
  const Observation obs = render_observation(train_town(), w, cam);
  for (int u = 0; u < cam.image_width; u += 7) {
    EXPECT_EQ(obs.semantic.at(u, 0), static_cast<uint8_t>(SemanticClass::kOther));
    EXPECT_EQ(obs.depth.at(u, 0), 1.0f);
  }
}

TEST(Render, VehicleTenMetersAhead) {
  const LaneSegment& lane = longest_lane(train_town());
  WorldState w = ego_only(pose_on(lane, 10.0));
  const Vec2 f = heading_vector(w.ego.heading);
  const Vec2 bumper = w.ego.position() + f * w.ego.half_length;
  // Near face 10 m in front of the camera.
  w.traffic_vehicles.push_back(parked_vehicle(bumper + f * (10.0 + 2.25), w.ego.heading, lane.id));
  const CameraConfig cam = small_camera();
  const Observation obs = render_observation(train_town(), w, cam);
  const int u = cam.image_width / 2;
  const int v = cam.image_height / 2;
  EXPECT_EQ(obs.semantic.at(u, v), static_cast<uint8_t>(SemanticClass::kVehicleOrPedestrian));
  EXPECT_NEAR(obs.depth.at(u, v), 0.10, 0.005);
}

TEST(Render, RejectsInvalidCamera) {
  const WorldState w = ego_only(pose_on(longest_lane(train_town()), 10.0));
  CameraConfig cam = small_camera();
  cam.far_plane = 0.0;
  EXPECT_FD_ERROR(render_observation(train_town(), w, cam), ErrorCode::kInvalidArgument);
}

// Property: agent labels coincide with agent hits, and ground depth grows
// monotonically up each column.
TEST(RenderProperty, RasterAlignment) {
  const CameraConfig cam = small_camera();
  for (uint64_t seed : {3u, 4u, 5u}) {
    ScenarioSpec spec{30, 30, weather_by_name("clear_afternoon"), seed, std::nullopt};
    const WorldState w = spawn_scenario(train_town(), spec);
    const Observation obs = render_observation(train_town(), w, cam);
    WorldState empty = w;
    empty.traffic_vehicles.clear();
    empty.pedestrians.clear();
    const Observation ground = render_observation(train_town(), empty, cam);
    for (int v = 0; v < cam.image_height; ++v)
      for (int u = 0; u < cam.image_width; ++u) {
        const bool agent = obs.semantic.at(u, v) == static_cast<uint8_t>(SemanticClass::kVehicleOrPedestrian);
        EXPECT_NE(ground.semantic.at(u, v), static_cast<uint8_t>(SemanticClass::kVehicleOrPedestrian));
        if (agent) {
          ASSERT_LE(obs.depth.at(u, v), ground.depth.at(u, v));
        } else {
          ASSERT_EQ(obs.depth.at(u, v), ground.depth.at(u, v));
          ASSERT_EQ(obs.semantic.at(u, v), ground.semantic.at(u, v));
        }
      }
    for (int u = 0; u < cam.image_width; ++u)
      for (int v = cam.image_height - 1; v > 0; --v) ASSERT_GE(ground.depth.at(u, v - 1), ground.depth.at(u, v));
  }
}

TEST(Route, SameSegmentIsAllLaneFollow) {
  const LaneSegment& lane = longest_lane(train_town());
  const RouteSpec route = plan_route(train_town(), pose_on(lane, 5.0), lane.path.position_at(lane.path.length() - 5.0));
  ASSERT_EQ(route.waypoints.size(), 1u);
  EXPECT_NEAR(route.length(), lane.path.length() - 10.0, 1e-9);
  for (double s = 0.0; s <= route.length(); s += 0.5) EXPECT_EQ(command_at(route, s), NavCommand::kLaneFollow);
}

TEST(Route, LeftTurnCommandOnlyNearTheJunction) {
  Rng rng(9);
  for (int found = 0, tries = 0; found < 5 && tries < 500; ++tries) {
    const RouteSpec route = sample_route(train_town(), RouteKind::kOneTurn, rng);
    auto it = std::find(route.per_segment_command.begin(), route.per_segment_command.end(), NavCommand::kTurnLeft);
    if (it == route.per_segment_command.end()) continue;
    ++found;
    const size_t k = static_cast<size_t>(it - route.per_segment_command.begin());
    const auto [begin, end] = route.segment_spans[k];
    const Polyline& connector = train_town().segment(route.waypoints[k]).path;
    EXPECT_LT(wrap_angle(connector.heading_at(connector.length()) - connector.heading_at(0.0)), -1.0);
    for (double s = 0.0; s <= route.length(); s += 0.25) {
      const bool inside = s >= begin - route.activation_radius && s <= end;
      if (inside) EXPECT_EQ(command_at(route, s), NavCommand::kTurnLeft) << s;
      else EXPECT_NE(command_at(route, s), NavCommand::kTurnLeft) << s;
    }
  }
}

TEST(Route, DisconnectedGoalIsUnreachable) {
  GridLayout g;
  g.xs = {0.0, 100.0};
  g.ys = {0.0, 100.0};
  g.horizontal = {{true}, {true}};
  g.vertical = {{false}, {false}};
  const TownMap town(TownId::kTrain, g);
  const LaneSegment* a = nullptr;
  const LaneSegment* b = nullptr;
  for (const auto& seg : town.segments()) {
    if (seg.kind != SegmentKind::kLane) continue;
    const double y = seg.path.points().front().y;
    if (y < 50.0 && !a) a = &seg;
    if (y > 50.0 && !b) b = &seg;
  }
  ASSERT_TRUE(a && b);
  EXPECT_FD_ERROR(plan_route(town, pose_on(*a, 10.0), b->path.position_at(20.0)), ErrorCode::kUnreachableGoal);
  EXPECT_FD_ERROR(plan_route(town, pose_on(*a, 10.0), {50.0, 50.0}), ErrorCode::kInvalidArgument);
}

// Property: one command per position, turn commands only inside
// activation windows of junction connectors.
TEST(RouteProperty, TurnCommandsOnlyInActivationWindows) {
  Rng rng(77);
  for (TownId id : {TownId::kTrain, TownId::kTest}) {
    const TownMap& town = builtin_town(id);
    for (int r = 0; r < 20; ++r) {
      const RouteSpec route = sample_route(town, RouteKind::kNavigation, rng);
      ASSERT_EQ(route.waypoints.size(), route.per_segment_command.size());
      for (size_t k = 1; k < route.waypoints.size(); ++k) {
        const auto& succ = town.segment(route.waypoints[k - 1]).successors;
        EXPECT_NE(std::find(succ.begin(), succ.end(), route.waypoints[k]), succ.end());
      }
      for (double s = 0.0; s <= route.length(); s += 0.5) {
        const NavCommand c = command_at(route, s);
        if (c == NavCommand::kLaneFollow) continue;
        bool windowed = false;
        for (size_t k = 0; k < route.waypoints.size(); ++k) {
          const LaneSegment& seg = town.segment(route.waypoints[k]);
          if (seg.kind != SegmentKind::kConnector || town.node_degree(seg.from_node) < 3) continue;
          const auto [begin, end] = route.segment_spans[k];
          windowed |= s >= begin - route.activation_radius && s <= end && seg.maneuver == c;
        }
        EXPECT_TRUE(windowed) << "s=" << s;
      }
    }
  }
}

TEST(Route, SampledKindsHonorTurnCounts) {
  Rng rng(4);
  for (int i = 0; i < 25; ++i) {
    const RouteSpec straight = sample_route(train_town(), RouteKind::kStraight, rng);
    EXPECT_EQ(route_turn_count(train_town(), straight), 0);
    EXPECT_GE(straight.length(), 25.0);
    const RouteSpec one = sample_route(train_town(), RouteKind::kOneTurn, rng);
    EXPECT_EQ(route_turn_count(train_town(), one), 1);
    const RouteSpec nav = sample_route(train_town(), RouteKind::kNavigation, rng, 150.0);
    EXPECT_GE(nav.length(), 150.0);
  }
}

TEST(Autopilot, CenteredOnEmptyLaneGoesStraightAtCruise) {
  const LaneSegment& lane = longest_lane(train_town());
  const Pose start = pose_on(lane, 5.0);
  const RouteSpec route = plan_route(train_town(), start, lane.path.position_at(lane.path.length() - 5.0));
  const WorldState w = ego_only(start, 6.0);
  const ControlCommand c = autopilot_action(w, route);
  EXPECT_NEAR(c.steer, 0.0, 1e-9);
  EXPECT_DOUBLE_EQ(c.speed, 6.0 / 10.0);
}

TEST(Autopilot, SteersRightWhenLeftOfCenter) {
  const LaneSegment& lane = longest_lane(train_town());
  const Pose start = pose_on(lane, 5.0);
  const RouteSpec route = plan_route(train_town(), start, lane.path.position_at(lane.path.length() - 5.0));
  const Vec2 left = -right_of(heading_vector(start.heading));
  const Vec2 p = start.position() + left * 0.5;
  const WorldState w = ego_only({p.x, p.y, start.heading}, 4.0);
  EXPECT_GT(autopilot_action(w, route).steer, 0.0);
  const Vec2 q = start.position() - left * 0.5;
  EXPECT_LT(autopilot_action(ego_only({q.x, q.y, start.heading}, 4.0), route).steer, 0.0);
}

TEST(Autopilot, StopsBehindStoppedVehicle) {
  const LaneSegment& lane = longest_lane(train_town());
  const Pose start = pose_on(lane, 5.0);
  const RouteSpec route = plan_route(train_town(), start, lane.path.position_at(lane.path.length() - 5.0));
  WorldState w = ego_only(start, 5.0);
  const Vec2 f = heading_vector(start.heading);
  // Rear bumper 4 m beyond the ego's front bumper.
  w.traffic_vehicles.push_back(parked_vehicle(w.ego.position() + f * (2.25 + 4.0 + 2.25), start.heading, lane.id));
  EXPECT_EQ(autopilot_action(w, route).speed, 0.0);
  WorldState far = ego_only(start, 5.0);
  far.traffic_vehicles.push_back(parked_vehicle(w.ego.position() + f * (2.25 + 9.0 + 2.25), start.heading, lane.id));
  EXPECT_GT(autopilot_action(far, route).speed, 0.0);
}

TEST(Autopilot, OffRouteError) {
  const LaneSegment& lane = longest_lane(train_town());
  const Pose start = pose_on(lane, 5.0);
  const RouteSpec route = plan_route(train_town(), start, lane.path.position_at(lane.path.length() - 5.0));
  const Vec2 p = start.position() + right_of(heading_vector(start.heading)) * 5.0;
  EXPECT_FD_ERROR(autopilot_action(ego_only({p.x, p.y, start.heading}), route), ErrorCode::kOffRoute);
}

TEST(Autopilot, ReachesGoalOnSampledRoutes) {
  Rng rng(31);
  for (int r = 0; r < 8; ++r) {
    const RouteSpec route = sample_route(train_town(), RouteKind::kNavigation, rng);
    WorldState w = ego_only(route.start_pose);
    Autopilot expert(route);
    bool reached = false;
    for (int t = 0; t < 3000 && !reached; ++t) {
      const ControlCommand c = expert.act(w);
      const double target = c.speed * 10.0;
      const double err = target - w.ego.speed;
      EgoControls u{c.steer, err > 0 ? std::min(1.0, 0.5 * err) : 0.0, err < -0.5 ? std::min(1.0, -0.3 * err) : 0.0};
      w = step(train_town(), w, u, 0.1);
      ASSERT_EQ(check_collision(train_town(), w).kind, CollisionKind::kNone);
      reached = norm(w.ego.position() - route.goal) < 2.0;
    }
    EXPECT_TRUE(reached) << "route " << r;
  }
}

TEST(Collision, OverlapIsEgoVsAgent) {
  const LaneSegment& lane = longest_lane(train_town());
  WorldState w = ego_only(pose_on(lane, 20.0));
  const Vec2 f = heading_vector(w.ego.heading);
  w.traffic_vehicles.push_back(parked_vehicle(w.ego.position() + f * (4.5 - 0.1), w.ego.heading, lane.id));
  const CollisionReport r = check_collision(train_town(), w);
  EXPECT_EQ(r.kind, CollisionKind::kEgoVsAgent);
  EXPECT_EQ(r.agent, 0);
}

TEST(Collision, DistantAgentsAreNone) {
  const LaneSegment& lane = longest_lane(train_town());
  WorldState w = ego_only(pose_on(lane, 20.0));
  const Vec2 f = heading_vector(w.ego.heading);
  w.traffic_vehicles.push_back(parked_vehicle(w.ego.position() + f * (4.5 + 5.0), w.ego.heading, lane.id));
  w.traffic_vehicles.push_back(parked_vehicle(w.ego.position() - f * (4.5 + 5.0), w.ego.heading, lane.id));
  EXPECT_EQ(check_collision(train_town(), w).kind, CollisionKind::kNone);
}

TEST(Collision, SidewalkIsOffRoad) {
  const LaneSegment& lane = longest_lane(train_town());
  const Pose p = pose_on(lane, 20.0);
  const Vec2 side = p.position() + right_of(heading_vector(p.heading)) * (0.5 * train_town().lane_width() + 1.5);
  const WorldState w = ego_only({side.x, side.y, p.heading});
  EXPECT_EQ(check_collision(train_town(), w).kind, CollisionKind::kEgoOffRoad);
}
