#include "scengen/domain.hpp"
#include "scengen/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace scengen {

BoundsTable BoundsTable::uav() {
    BoundsTable t;
    t.lo.resize(kUavGenomeDim);
    t.hi.resize(kUavGenomeDim);
    t.lo[0] = 1.0;
    t.hi[0] = 3.0;
    const Scalar block_lo[kObstacleFields] = {-40.0, 10.0, 2.0, 2.0, 15.0, 0.0};
    const Scalar block_hi[kObstacleFields] = {30.0, 40.0, 20.0, 20.0, 25.0, 90.0};
    for (int b = 0; b < kMaxObstacles; ++b) {
        for (int f = 0; f < kObstacleFields; ++f) {
            t.lo[1 + b * kObstacleFields + f] = block_lo[f];
            t.hi[1 + b * kObstacleFields + f] = block_hi[f];
        }
    }
    return t;
}

BoundsTable BoundsTable::road() {
    BoundsTable t;
    t.lo = Vector::Constant(kRoadGenomeDim, -0.07);
    t.hi = Vector::Constant(kRoadGenomeDim, 0.07);
    t.relative_bound = 0.05;
    return t;
}

const char* violation_name(Violation v) {
    switch (v) {
        case Violation::ObstacleOverlap: return "ObstacleOverlap";
        case Violation::PathBlocked: return "PathBlocked";
        case Violation::OutOfMap: return "OutOfMap";
        case Violation::TooSharp: return "TooSharp";
        case Violation::SelfIntersect: return "SelfIntersect";
    }
    return "Unknown";
}

Genome sample_uav_genome(Rng& rng, const BoundsTable& bounds) {
    Genome g;
    g.space = Space::Original;
    g.values.resize(bounds.size());
    g.values[0] = static_cast<Scalar>(
        rng.uniform_int(static_cast<int>(bounds.lo[0]), static_cast<int>(bounds.hi[0])));
    for (Eigen::Index i = 1; i < bounds.size(); ++i)
        g.values[i] = rng.uniform(bounds.lo[i], bounds.hi[i]);
    return g;
}

Genome sample_kappa_genome(Rng& rng, const BoundsTable& bounds) {
    Genome g;
    g.space = Space::Original;
    g.values.resize(bounds.size());
    const Scalar rb = bounds.relative_bound;
    g.values[0] = rng.uniform(bounds.lo[0], bounds.hi[0]);
    for (Eigen::Index i = 1; i < bounds.size(); ++i) {
        Scalar lo = std::max(bounds.lo[i], g.values[i - 1] - rb);
        Scalar hi = std::min(bounds.hi[i], g.values[i - 1] + rb);
        g.values[i] = rng.uniform(lo, hi);
    }
    return g;
}

ObstacleScene genome_to_scene(const Genome& g) {
    if (g.values.size() != kUavGenomeDim)
        throw std::invalid_argument("genome_to_scene: expected length 19, got " +
                                    std::to_string(g.values.size()));
    // round half-up, then clamp to the representable count range
    int n = static_cast<int>(std::floor(g.values[0] + 0.5));
    n = std::clamp(n, 1, kMaxObstacles);

    ObstacleScene scene;
    scene.obstacles.reserve(static_cast<std::size_t>(n));
    for (int b = 0; b < n; ++b) {
        const Eigen::Index base = 1 + b * kObstacleFields;
        Obstacle o;
        o.cx = g.values[base + 0];
        o.cy = g.values[base + 1];
        o.length = g.values[base + 2];
        o.width = g.values[base + 3];
        o.height = g.values[base + 4];
        o.rotation_deg = g.values[base + 5];
        scene.obstacles.push_back(o);
    }
    return scene;
}

RoadSpec genome_to_road(const Genome& g, Scalar map_size) {
    if (g.values.size() != kRoadGenomeDim)
        throw std::invalid_argument("genome_to_road: expected length 17, got " +
                                    std::to_string(g.values.size()));
    RoadSpec r;
    r.kappas = g.values;
    r.map_size = map_size;
    r.polyline = kappa_to_polyline(g.values, kRoadStep, road_start(), kRoadStartHeading);
    return r;
}

Genome normalize(const Genome& g, const BoundsTable& bounds) {
    Genome out = g;
    for (Eigen::Index i = 0; i < g.values.size(); ++i) {
        Scalar span = bounds.hi[i] - bounds.lo[i];
        out.values[i] = span > 0 ? 2.0 * (g.values[i] - bounds.lo[i]) / span - 1.0 : 0.0;
    }
    return out;
}

Genome denormalize(const Genome& g, const BoundsTable& bounds) {
    Genome out = g;
    for (Eigen::Index i = 0; i < g.values.size(); ++i) {
        Scalar x = std::clamp(g.values[i], -1.0, 1.0);
        out.values[i] = bounds.lo[i] + (x + 1.0) * 0.5 * (bounds.hi[i] - bounds.lo[i]);
    }
    return out;
}

}  // namespace scengen
