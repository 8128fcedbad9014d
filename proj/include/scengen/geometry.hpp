#pragma once

#include "scengen/domain.hpp"
#include "scengen/types.hpp"

#include <optional>
#include <vector>

namespace scengen {

/// A rectangle described by its center, half extents and rotation.
struct OrientedRect {
    Scalar cx = 0, cy = 0;
    Scalar half_len = 1, half_wid = 1;  // along local x / local y
    Scalar rotation = 0;                // radians

    std::array<Vec2, 4> corners() const;

    static OrientedRect from_obstacle(const Obstacle& o, Scalar inflate = 0.0);
};

using Polyline = std::vector<Vec2>;

/// Closed-rectangle overlap via the separating-axis test over the 4 edge normals.
bool rects_intersect(const OrientedRect& a, const OrientedRect& b);

/// True if p lies inside or on the rectangle.
bool point_in_rect(const Vec2& p, const OrientedRect& r);

/// Euclidean distance from p to the rectangle (0 inside).
Scalar point_rect_distance(const Vec2& p, const OrientedRect& r);

/// Forward integration of a curvature sequence: heading accumulates kappa*ds
/// per step, positions advance ds along the pre-step heading. Returns the
/// start plus one point per curvature value.
Polyline kappa_to_polyline(const Vector& kappas, Scalar ds, const Vec2& start, Scalar heading);

/// Centripetal Catmull-Rom interpolation through all control points.
/// samples_per_segment = 1 reproduces the control polygon exactly.
Polyline smooth_spline(const Polyline& control, int samples_per_segment);

/// True if segments (a1,a2) and (b1,b2) intersect, including endpoints.
bool segments_intersect(const Vec2& a1, const Vec2& a2, const Vec2& b1, const Vec2& b2);

/// Occupancy-grid reachability from start to goal with obstacles inflated by
/// the given radius. 4-connected flood fill at the given cell size.
bool path_exists(const ObstacleScene& scene, Scalar inflation, Scalar resolution);

constexpr Scalar kFloodFillResolution = 0.5;
constexpr Scalar kUavSafetyRadius = 1.5;
constexpr Scalar kLaneHalfWidth = 2.0;
constexpr Scalar kKappaLimit = 0.07;
constexpr int kRoadSmoothSamples = 5;

/// Constraint checks for an obstacle scene: pairwise overlap and existence of
/// a corridor wide enough for the safety radius.
ValidityReport scene_validity(const ObstacleScene& s);

/// Constraint checks for a road: map containment of the smoothed centerline
/// (inflated by the lane half-width), curvature limit, self-intersection.
ValidityReport road_validity(const RoadSpec& r);

Scalar polyline_length(const Polyline& p);

/// Index of the closest segment and the projected point on it.
struct PolylineProjection {
    Eigen::Index segment = 0;
    Vec2 point{0, 0};
    Scalar distance = 0;
};
PolylineProjection project_to_polyline(const Vec2& p, const Polyline& line);

}  // namespace scengen
