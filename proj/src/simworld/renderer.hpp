#pragma once

#include "common/raster.hpp"
#include "simworld/town.hpp"
#include "simworld/world.hpp"

namespace fusiondrive::sim {

struct CameraConfig {
  int image_width = 800;
  int image_height = 600;
  double horizontal_fov = 90.0;  // degrees
  double mount_height = 1.6;     // meters above ground
  double pitch = -8.0;           // degrees, negative looks down
  double far_plane = 100.0;      // meters

  bool operator==(const CameraConfig&) const = default;
};

/// Pixel-aligned camera rasters. rgb and depth are in [0, 1].
struct Observation {
  ImageF rgb;            // 3 channels
  ImageF depth;          // 1 channel, distance / far_plane
  LabelImage semantic;   // SemanticClass values
};

inline constexpr double kVehicleHeight = 1.5;
inline constexpr double kPedestrianHeight = 1.8;

/// Camera sits at the ego's front bumper center, looking along its heading.
Observation render_observation(const TownMap& town, const WorldState& state,
                               const CameraConfig& cam);

/// Distance along the ray through pixel (u, v) center to the ground plane,
/// or +inf when the ray does not descend.
double ground_ray_distance(const CameraConfig& cam, double u, double v);

}  // namespace fusiondrive::sim
