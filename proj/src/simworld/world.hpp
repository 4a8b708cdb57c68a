#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "common/rng.hpp"
#include "simworld/geometry.hpp"
#include "simworld/town.hpp"
#include "simworld/weather.hpp"

namespace fusiondrive::sim {

struct VehicleState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // wrapped to (-pi, pi]
  double speed = 0.0;    // m/s, >= 0
  double yaw_rate = 0.0; // rad/s, unwrapped heading change over the last step
  double half_length = 2.25;
  double half_width = 1.0;

  Vec2 position() const { return {x, y}; }
  Pose pose() const { return {x, y, heading}; }
  OrientedBox box() const { return {{x, y}, heading, half_length, half_width}; }
  bool operator==(const VehicleState&) const = default;
};

struct TrafficVehicle {
  VehicleState state;
  int segment = 0;
  int next_segment = -1;  // successor taken at the end of `segment`
  double s = 0.0;
  double cruise_speed = 4.5;
  double stopped_time = 0.0;
  uint32_t color_id = 0;

  bool operator==(const TrafficVehicle&) const = default;
};

enum class PedestrianMode { kWalking, kCrossing };

struct Pedestrian {
  VehicleState state;
  bool vertical_road = false;  // road runs along y (true) or x (false)
  int line = 0;                // grid column (vertical) or row (horizontal)
  int span = 0;                // road segment index along that line
  int side = 1;                // sidewalk side: +1 / -1 of the centerline
  double along = 0.0;          // coordinate along the road axis
  double lateral = 0.0;        // offset from the road centerline
  int direction = 1;
  PedestrianMode mode = PedestrianMode::kWalking;
  double walk_speed = 1.3;
  uint32_t color_id = 0;

  bool operator==(const Pedestrian&) const = default;
};

struct WorldState {
  double time = 0.0;
  int64_t tick = 0;
  VehicleState ego;
  std::vector<TrafficVehicle> traffic_vehicles;
  std::vector<Pedestrian> pedestrians;
  WeatherParams weather;
  Rng rng;

  bool operator==(const WorldState&) const = default;
};

struct VehicleParams {
  double wheelbase = 2.5;
  double v_max = 10.0;
  double steer_scale_deg = 70.0;     // normalized steer -> front-wheel degrees
  double max_wheel_angle_deg = 35.0; // physical clamp
  double max_accel = 3.0;            // m/s^2 at full throttle
  double max_brake = 8.0;            // m/s^2 at full brake
  double rolling_c0 = 0.15;          // m/s^2
  double rolling_c1 = 0.02;          // 1/s
  double half_length = 2.25;
  double half_width = 1.0;

  bool operator==(const VehicleParams&) const = default;
};

struct TrafficParams {
  double vehicle_speed_min = 3.5;
  double vehicle_speed_max = 5.5;
  double follow_distance = 8.0;
  double standstill_gap = 3.0;
  double respawn_after_stopped_s = 8.0;
  double pedestrian_cross_rate = 0.03;  // per second while walking
  double pedestrian_clearance = 15.0;
  double spawn_clearance = 2.0;
  double ego_spawn_exclusion = 15.0;

  bool operator==(const TrafficParams&) const = default;
};

struct SimParams {
  VehicleParams vehicle;
  TrafficParams traffic;

  bool operator==(const SimParams&) const = default;
};

/// Actuation in simulator units: normalized steer, throttle and brake.
struct EgoControls {
  double steer = 0.0;    // [-1, 1]
  double throttle = 0.0; // [0, 1]
  double brake = 0.0;    // [0, 1]
};

struct ScenarioSpec {
  int n_vehicles = 0;
  int n_pedestrians = 0;
  WeatherParams weather;
  uint64_t seed = 0;
  std::optional<Pose> ego_start;
};

/// Places the ego and the requested agents without initial overlap.
/// Throws Error(kPlacementInfeasible) when the map cannot hold them.
WorldState spawn_scenario(const TownMap& town, const ScenarioSpec& spec,
                          const SimParams& params = {});

/// Advances time by dt. Inputs are clamped to their ranges.
WorldState step(const TownMap& town, const WorldState& state, const EgoControls& controls,
                double dt, const SimParams& params = {});

/// Front-wheel angle (radians) for a normalized steer, after the physical clamp.
double wheel_angle(double steer_norm, const VehicleParams& params);

/// Ego bicycle update only (no traffic), exposed for tests and tools.
VehicleState integrate_ego(const VehicleState& ego, const EgoControls& controls, double dt,
                           const VehicleParams& params);

}  // namespace fusiondrive::sim
