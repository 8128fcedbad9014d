#pragma once

#include "scengen/types.hpp"

#include <vector>

namespace scengen {

enum class Space { Original, Latent };
enum class UseCase { Uav, Ads };

/// A fixed-length real vector, the unit of evolution. Original-space genomes
/// live inside a BoundsTable; latent genomes live in [-3, 3] per dimension.
struct Genome {
    Vector values;
    Space space = Space::Original;

    Eigen::Index size() const { return values.size(); }
};

/// Per-dimension (lo, hi) sampling ranges. For the road problem every
/// dimension shares the same global curvature bound and an additional
/// relative bound limits the step between consecutive curvatures.
struct BoundsTable {
    Vector lo;
    Vector hi;
    Scalar relative_bound = 0.0;  // 0 when unused (obstacle table)

    Eigen::Index size() const { return lo.size(); }

    bool contains(const Vector& v, Scalar tol = 1e-12) const {
        if (v.size() != lo.size()) return false;
        return (v.array() >= lo.array() - tol).all() && (v.array() <= hi.array() + tol).all();
    }

    /// 19-entry obstacle-scene table: count then 3 blocks of {x, y, l, w, h, r}.
    static BoundsTable uav();
    /// 17 curvature entries, all (-0.07, 0.07), with relative bound 0.05.
    static BoundsTable road();
};

constexpr int kUavGenomeDim = 19;
constexpr int kRoadGenomeDim = 17;
constexpr int kObstacleFields = 6;
constexpr int kMaxObstacles = 3;

constexpr Scalar kLatentLo = -3.0;
constexpr Scalar kLatentHi = 3.0;

/// Flight arena and mission for the obstacle-placement problem: a straight
/// 50 m leg from (0,0) to (0,50) inside a box enclosing the obstacle ranges.
struct Mission {
    Vec2 start{0.0, 0.0};
    Vec2 goal{0.0, 50.0};
    Scalar x_min = -45.0, x_max = 35.0;
    Scalar y_min = 0.0, y_max = 55.0;
};

struct Obstacle {
    Scalar cx = 0, cy = 0;
    Scalar length = 0, width = 0, height = 0;
    Scalar rotation_deg = 0;
};

struct ObstacleScene {
    std::vector<Obstacle> obstacles;  // 1..3
    Mission mission;
};

/// Road topology: signed curvatures integrated into a 2D centerline on a
/// square map. The polyline is derived deterministically from the kappas.
struct RoadSpec {
    Vector kappas;
    std::vector<Vec2> polyline;
    Scalar map_size = 200.0;
};

constexpr Scalar kRoadMapSize = 200.0;
constexpr Scalar kRoadStep = 10.0;                  // arc length per curvature value
inline Vec2 road_start() { return {100.0, 10.0}; }  // heading +y
constexpr Scalar kRoadStartHeading = M_PI / 2.0;

enum class Violation { ObstacleOverlap, PathBlocked, OutOfMap, TooSharp, SelfIntersect };

struct ValidityReport {
    std::vector<Violation> violations;
    bool valid() const { return violations.empty(); }
};

const char* violation_name(Violation v);

/// Uniform sample of a 19-entry obstacle genome; entry 0 is an integer count in {1,2,3}.
Genome sample_uav_genome(Rng& rng, const BoundsTable& bounds);

/// Chained curvature sample: each value stays within the global bound and
/// within the relative bound of its predecessor.
Genome sample_kappa_genome(Rng& rng, const BoundsTable& bounds);

/// Decode an obstacle genome. Total over any real 19-vector: the count gene is
/// rounded half-up and clamped to [1, 3]; trailing blocks are ignored.
ObstacleScene genome_to_scene(const Genome& g);

/// Decode a curvature genome into a road anchored at the standard start pose.
RoadSpec genome_to_road(const Genome& g, Scalar map_size = kRoadMapSize);

/// Per-dimension affine map onto [-1, 1].
Genome normalize(const Genome& g, const BoundsTable& bounds);

/// Inverse of normalize; inputs outside [-1, 1] are clamped to the boundary
/// first so that decoding stays total.
Genome denormalize(const Genome& g, const BoundsTable& bounds);

}  // namespace scengen
