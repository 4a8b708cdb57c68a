#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "common/commands.hpp"
#include "simworld/geometry.hpp"

namespace fusiondrive::sim {

enum class TownId { kTrain, kTest };

std::string_view to_string(TownId id);
TownId town_id_from_string(std::string_view s);

/// Ground-truth per-pixel classes, in the decoder's channel order.
enum class SemanticClass : uint8_t {
  kLane = 0,
  kRoadLine = 1,
  kSidewalk = 2,
  kVehicleOrPedestrian = 3,
  kOther = 4,
};
inline constexpr int kNumSemanticClasses = 5;

/// Axis-aligned road grid: nodes at (xs[i], ys[j]); roads along grid lines.
struct GridLayout {
  std::vector<double> xs;
  std::vector<double> ys;
  // horizontal[j][i]: road between (i, j) and (i + 1, j).
  std::vector<std::vector<bool>> horizontal;
  // vertical[i][j]: road between (i, j) and (i, j + 1).
  std::vector<std::vector<bool>> vertical;
};

struct RoadGeometry {
  double lane_width = 3.5;      // two lanes per road, one per direction
  double sidewalk_width = 3.0;  // band beyond the road edge
  double right_turn_radius = 5.0;
  double curb_fillet_radius = 4.0;
  double dash_length = 3.0;
  double dash_period = 6.0;
  double line_half_width = 0.1;

  double road_half_width() const { return lane_width; }
  /// Distance from node center at which lane segments end and connectors begin.
  double junction_margin() const { return right_turn_radius + 0.5 * lane_width; }
};

enum class SegmentKind { kLane, kConnector };

/// Directed lane centerline; connectors live inside intersections.
struct LaneSegment {
  int id = 0;
  SegmentKind kind = SegmentKind::kLane;
  Polyline path;
  int from_node = -1;  // grid node index the lane leaves (lanes) / junction node (connectors)
  int to_node = -1;
  /// For connectors: lane_follow through corners and straight-through nodes,
  /// the turn type at intersections.
  NavCommand maneuver = NavCommand::kLaneFollow;
  std::vector<int> successors;
  std::vector<int> predecessors;
};

struct Intersection {
  int node = 0;
  Vec2 center;
  int degree = 0;
  /// Exit direction labels per incoming approach, keyed by connector id.
  std::vector<std::pair<int, NavCommand>> exits;
};

struct SurfaceSample {
  SemanticClass label = SemanticClass::kOther;
  bool on_road = false;
};

class TownMap {
 public:
  TownMap(TownId id, GridLayout layout, RoadGeometry geometry = {});

  TownId id() const { return id_; }
  const GridLayout& layout() const { return layout_; }
  const RoadGeometry& geometry() const { return geometry_; }
  double lane_width() const { return geometry_.lane_width; }
  /// Sidewalk band as lateral offset range from the road centerline.
  std::pair<double, double> sidewalk_band() const {
    return {geometry_.road_half_width(), geometry_.road_half_width() + geometry_.sidewalk_width};
  }

  const std::vector<LaneSegment>& segments() const { return segments_; }
  const LaneSegment& segment(int id) const { return segments_.at(id); }
  const std::vector<Intersection>& intersections() const { return intersections_; }

  int node_count() const { return static_cast<int>(layout_.xs.size() * layout_.ys.size()); }
  int node_index(int i, int j) const { return j * static_cast<int>(layout_.xs.size()) + i; }
  Vec2 node_position(int node) const;
  int node_degree(int node) const;
  int road_count() const;
  double total_road_length() const;

  /// Ground class at a world point (no agents).
  SurfaceSample classify(Vec2 p) const;
  bool on_road(Vec2 p) const { return classify(p).on_road; }

  struct LanePoint {
    int segment = -1;
    double s = 0.0;
    double distance = 0.0;
  };
  /// Nearest lane point; with a heading, only segments whose local direction
  /// is within 60 degrees are considered.
  std::optional<LanePoint> locate(Vec2 p, std::optional<double> heading = std::nullopt,
                                  bool lanes_only = false) const;

  /// Palette index used by the renderer (towns differ visually).
  int palette() const { return id_ == TownId::kTrain ? 0 : 1; }
  uint64_t texture_seed() const { return id_ == TownId::kTrain ? 0x7A11 : 0x7E57; }

 private:
  bool has_horizontal(int i, int j) const;
  bool has_vertical(int i, int j) const;
  void build_lane_graph();
  int add_segment(LaneSegment seg);

  TownId id_;
  GridLayout layout_;
  RoadGeometry geometry_;
  std::vector<LaneSegment> segments_;
  std::vector<Intersection> intersections_;
};

/// The two built-in towns, generated procedurally from fixed seeds.
const TownMap& builtin_town(TownId id);
TownMap make_town(TownId id);

}  // namespace fusiondrive::sim
