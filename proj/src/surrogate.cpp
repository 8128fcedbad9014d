#include "scengen/surrogate.hpp"

#include <algorithm>
#include <cmath>

namespace scengen {

namespace {

bool segment_hits_rect(const Vec2& a, const Vec2& b, const OrientedRect& r) {
    if (point_in_rect(a, r) || point_in_rect(b, r)) return true;
    const auto c = r.corners();
    for (int i = 0; i < 4; ++i)
        if (segments_intersect(a, b, c[i], c[(i + 1) % 4])) return true;
    return false;
}

bool segment_free(const Vec2& a, const Vec2& b, const std::vector<OrientedRect>& rects) {
    for (const auto& r : rects)
        if (segment_hits_rect(a, b, r)) return false;
    return true;
}

// Uniform bucket grid over the arena for nearest/near queries.
class PointGrid {
public:
    PointGrid(const Mission& m, Scalar cell)
        : x0_(m.x_min), y0_(m.y_min), cell_(cell),
          nx_(static_cast<int>(std::ceil((m.x_max - m.x_min) / cell)) + 1),
          ny_(static_cast<int>(std::ceil((m.y_max - m.y_min) / cell)) + 1),
          buckets_(static_cast<std::size_t>(nx_) * ny_) {}

    void insert(int id, const Vec2& p) { buckets_[cell_of(p)].push_back(id); }

    template <typename Dist>
    int nearest(const Vec2& p, const Dist& dist_to) const {
        int best = -1;
        Scalar best_d = INFINITY;
        const int cx = ix(p.x()), cy = iy(p.y());
        const int max_ring = std::max(nx_, ny_);
        for (int ring = 0; ring <= max_ring; ++ring) {
            if (best >= 0 && (static_cast<Scalar>(ring) - 1.0) * cell_ > best_d) break;
            visit_ring(cx, cy, ring, [&](const std::vector<int>& bucket) {
                for (int id : bucket) {
                    Scalar d = dist_to(id);
                    if (d < best_d) {
                        best_d = d;
                        best = id;
                    }
                }
            });
        }
        return best;
    }

    template <typename Dist>
    std::vector<int> near(const Vec2& p, Scalar radius, const Dist& dist_to) const {
        std::vector<int> out;
        const int r = static_cast<int>(radius / cell_) + 1;
        const int cx = ix(p.x()), cy = iy(p.y());
        for (int gy = std::max(0, cy - r); gy <= std::min(ny_ - 1, cy + r); ++gy)
            for (int gx = std::max(0, cx - r); gx <= std::min(nx_ - 1, cx + r); ++gx)
                for (int id : buckets_[static_cast<std::size_t>(gy) * nx_ + gx])
                    if (dist_to(id) <= radius) out.push_back(id);
        return out;
    }

private:
    int ix(Scalar x) const { return std::clamp(static_cast<int>((x - x0_) / cell_), 0, nx_ - 1); }
    int iy(Scalar y) const { return std::clamp(static_cast<int>((y - y0_) / cell_), 0, ny_ - 1); }
    std::size_t cell_of(const Vec2& p) const {
        return static_cast<std::size_t>(iy(p.y())) * nx_ + ix(p.x());
    }

    template <typename Fn>
    void visit_ring(int cx, int cy, int ring, const Fn& fn) const {
        const int x_lo = cx - ring, x_hi = cx + ring;
        const int y_lo = cy - ring, y_hi = cy + ring;
        for (int gy = std::max(0, y_lo); gy <= std::min(ny_ - 1, y_hi); ++gy) {
            const bool edge_row = gy == y_lo || gy == y_hi;
            for (int gx = std::max(0, x_lo); gx <= std::min(nx_ - 1, x_hi); ++gx) {
                if (!edge_row && gx != x_lo && gx != x_hi) continue;
                fn(buckets_[static_cast<std::size_t>(gy) * nx_ + gx]);
            }
        }
    }

    Scalar x0_, y0_, cell_;
    int nx_, ny_;
    std::vector<std::vector<int>> buckets_;
};

}  // namespace

std::optional<Polyline> rrt_star(const ObstacleScene& scene, const PlannerParams& params) {
    const Mission& m = scene.mission;
    std::vector<OrientedRect> rects;
    rects.reserve(scene.obstacles.size());
    for (const Obstacle& o : scene.obstacles) rects.push_back(OrientedRect::from_obstacle(o));

    struct Node {
        Vec2 p;
        int parent;
        Scalar cost;
    };
    std::vector<Node> nodes;
    nodes.reserve(static_cast<std::size_t>(params.max_iterations) + 1);
    std::vector<std::vector<int>> children;
    children.reserve(nodes.capacity());

    nodes.push_back({m.start, -1, 0.0});
    children.emplace_back();

    PointGrid grid(m, params.neighbor_radius);
    grid.insert(0, m.start);

    Rng rng(params.rng_seed);

    int goal_parent = -1;
    Scalar goal_cost = INFINITY;

    auto propagate_cost = [&](int root) {
        std::vector<int> stack{root};
        while (!stack.empty()) {
            int id = stack.back();
            stack.pop_back();
            for (int c : children[static_cast<std::size_t>(id)]) {
                nodes[static_cast<std::size_t>(c)].cost =
                    nodes[static_cast<std::size_t>(id)].cost +
                    (nodes[static_cast<std::size_t>(c)].p - nodes[static_cast<std::size_t>(id)].p).norm();
                stack.push_back(c);
            }
        }
    };

    for (int iter = 0; iter < params.max_iterations; ++iter) {
        const Vec2 sample = rng.uniform() < params.goal_bias
                                ? m.goal
                                : Vec2{rng.uniform(m.x_min, m.x_max), rng.uniform(m.y_min, m.y_max)};

        const int nearest = grid.nearest(
            sample, [&](int id) { return (nodes[static_cast<std::size_t>(id)].p - sample).norm(); });
        const Vec2& from = nodes[static_cast<std::size_t>(nearest)].p;
        Vec2 to = sample;
        const Scalar d = (to - from).norm();
        if (d < 1e-9) continue;
        if (d > params.step) to = from + (params.step / d) * (to - from);
        if (!segment_free(from, to, rects)) continue;

        // choose the cheapest collision-free parent within the neighborhood
        auto near = grid.near(
            to, params.neighbor_radius,
            [&](int id) { return (nodes[static_cast<std::size_t>(id)].p - to).norm(); });
        int parent = nearest;
        Scalar best_cost = nodes[static_cast<std::size_t>(nearest)].cost + (to - from).norm();
        for (int id : near) {
            const Node& n = nodes[static_cast<std::size_t>(id)];
            Scalar c = n.cost + (to - n.p).norm();
            if (c < best_cost && segment_free(n.p, to, rects)) {
                best_cost = c;
                parent = id;
            }
        }

        const int new_id = static_cast<int>(nodes.size());
        nodes.push_back({to, parent, best_cost});
        children.emplace_back();
        children[static_cast<std::size_t>(parent)].push_back(new_id);
        grid.insert(new_id, to);

        // rewire the neighborhood through the new node where that is cheaper
        for (int id : near) {
            Node& n = nodes[static_cast<std::size_t>(id)];
            Scalar c = best_cost + (n.p - to).norm();
            if (c + 1e-12 < n.cost && segment_free(to, n.p, rects)) {
                auto& sibs = children[static_cast<std::size_t>(n.parent)];
                sibs.erase(std::find(sibs.begin(), sibs.end(), id));
                n.parent = new_id;
                n.cost = c;
                children[static_cast<std::size_t>(new_id)].push_back(id);
                propagate_cost(id);
            }
        }

        const Scalar to_goal = (m.goal - to).norm();
        if (to_goal <= params.step && segment_free(to, m.goal, rects)) {
            if (best_cost + to_goal < goal_cost) {
                goal_cost = best_cost + to_goal;
                goal_parent = new_id;
            }
        }
    }

    if (goal_parent < 0) return std::nullopt;

    // costs may have improved after the goal link was recorded; re-scan
    for (std::size_t id = 0; id < nodes.size(); ++id) {
        const Scalar to_goal = (m.goal - nodes[id].p).norm();
        if (to_goal <= params.step && nodes[id].cost + to_goal < goal_cost &&
            segment_free(nodes[id].p, m.goal, rects)) {
            goal_cost = nodes[id].cost + to_goal;
            goal_parent = static_cast<int>(id);
        }
    }

    Polyline path;
    path.push_back(m.goal);
    for (int id = goal_parent; id >= 0; id = nodes[static_cast<std::size_t>(id)].parent)
        path.push_back(nodes[static_cast<std::size_t>(id)].p);
    std::reverse(path.begin(), path.end());
    return path;
}

FitnessOutcome f_s_uav(const ObstacleScene& scene, const PlannerParams& params) {
    FitnessOutcome out;
    if (!scene_validity(scene).valid()) {
        out.valid = false;
        out.fitness = kPenaltyFitness;
        return out;
    }
    auto path = rrt_star(scene, params);
    if (!path) {
        // flood fill admitted the scene but the planner budget did not reach it
        out.valid = false;
        out.fitness = kPenaltyFitness;
        return out;
    }
    const Scalar straight = (scene.mission.goal - scene.mission.start).norm();
    out.fitness = -polyline_length(*path) / straight;
    return out;
}

FitnessOutcome f_s_road(const RoadSpec& road) {
    FitnessOutcome out;
    if (!road_validity(road).valid()) {
        out.valid = false;
        out.fitness = kPenaltyFitness;
        return out;
    }
    out.fitness = -road.kappas.array().abs().maxCoeff();
    return out;
}

namespace {

Polyline resample_by_arc(const Polyline& line, Scalar step) {
    Polyline out;
    if (line.empty()) return out;
    out.push_back(line.front());
    Scalar carried = 0;
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
        const Vec2 a = line[i], b = line[i + 1];
        const Scalar seg = (b - a).norm();
        if (seg < 1e-12) continue;
        Scalar along = step - carried;
        while (along <= seg) {
            out.push_back(a + (along / seg) * (b - a));
            along += step;
        }
        carried = seg - (along - step);
    }
    if ((out.back() - line.back()).norm() > 1e-9) out.push_back(line.back());
    return out;
}

}  // namespace

FitnessOutcome f_sim_uav(const ObstacleScene& scene, const PlannerParams& params) {
    FitnessOutcome out;
    if (!scene_validity(scene).valid()) {
        out.valid = false;
        out.fitness = kUavSimPenalty;
        return out;
    }

    ObstacleScene inflated = scene;
    std::vector<OrientedRect> raw_rects;
    raw_rects.reserve(scene.obstacles.size());
    for (const Obstacle& o : scene.obstacles) raw_rects.push_back(OrientedRect::from_obstacle(o));
    for (Obstacle& o : inflated.obstacles) {
        o.length += 2.0 * kUavPlanInflation;
        o.width += 2.0 * kUavPlanInflation;
    }

    auto path = rrt_star(inflated, params);
    if (!path) {
        // a valid scene the planner could not solve at margin: the strongest test signal
        out.fitness = 0.0;
        out.robustness = -kUavSafetyRadius;
        out.failed = true;
        return out;
    }

    Polyline flown = path->size() >= 4 ? smooth_spline(*path, 5) : *path;
    flown = resample_by_arc(flown, kUavWalkStep);

    Scalar min_clear = kClearanceSentinel;
    Eigen::Index worst = -1;
    Scalar s = 0;
    out.trace.reserve(flown.size());
    for (std::size_t i = 0; i < flown.size(); ++i) {
        Scalar clear = kClearanceSentinel;
        for (const auto& r : raw_rects) clear = std::min(clear, point_rect_distance(flown[i], r));
        out.trace.push_back({s, clear});
        if (clear < min_clear) {
            min_clear = clear;
            worst = static_cast<Eigen::Index>(i);
        }
        s += kUavWalkStep;
    }

    out.fitness = min_clear;
    out.robustness = min_clear - kUavSafetyRadius;
    out.failed = out.robustness < 0;
    out.fail_segment = out.failed ? worst : -1;
    return out;
}

namespace {

struct VehicleRun {
    Trace trace;
    std::vector<Vec2> poses;
    Scalar max_fraction_out = 0;
    Eigen::Index fail_segment = -1;
};

VehicleRun run_vehicle(const RoadSpec& road, const VehicleParams& veh) {
    VehicleRun run;
    const Polyline center = smooth_spline(road.polyline, kRoadSmoothSamples);
    const Scalar total_len = polyline_length(center);

    std::vector<Scalar> cum(center.size(), 0);
    for (std::size_t i = 1; i < center.size(); ++i)
        cum[i] = cum[i - 1] + (center[i] - center[i - 1]).norm();

    Vec2 pos = center.front();
    Scalar heading = std::atan2(center[1].y() - center[0].y(), center[1].x() - center[0].x());

    const Scalar t_max = 2.0 * total_len / veh.speed + 10.0;
    const Scalar half_width = veh.width * 0.5;

    for (Scalar t = 0; t < t_max; t += veh.dt) {
        const auto proj = project_to_polyline(pos, center);
        const Scalar fraction_out =
            std::clamp((proj.distance + half_width - veh.lane_half_width) / veh.width, 0.0, 1.0);
        run.trace.push_back({t, 1.0 - fraction_out});
        run.poses.push_back(pos);
        if (fraction_out > run.max_fraction_out) {
            run.max_fraction_out = fraction_out;
            run.fail_segment = proj.segment;
        }

        const Scalar arc = cum[static_cast<std::size_t>(proj.segment)] +
                           (proj.point - center[static_cast<std::size_t>(proj.segment)]).norm();
        if (arc >= total_len - 0.5) break;

        // closed-loop pure-pursuit derivative at an arbitrary state
        const auto derivative = [&](const Vec2& p, Scalar theta) {
            const auto at = project_to_polyline(p, center);
            const Scalar s = cum[static_cast<std::size_t>(at.segment)] +
                             (at.point - center[static_cast<std::size_t>(at.segment)]).norm();
            Scalar target_arc = s + veh.lookahead;
            Vec2 target = center.back();
            for (std::size_t i = 1; i < center.size(); ++i) {
                if (cum[i] >= target_arc) {
                    const Scalar seg = cum[i] - cum[i - 1];
                    const Scalar w = seg > 1e-12 ? (target_arc - cum[i - 1]) / seg : 0.0;
                    target = center[i - 1] + w * (center[i] - center[i - 1]);
                    break;
                }
            }
            const Scalar alpha = std::atan2(target.y() - p.y(), target.x() - p.x()) - theta;
            const Scalar ld = std::max((target - p).norm(), 1e-6);
            const Scalar steer = std::clamp(std::atan2(2.0 * veh.wheelbase * std::sin(alpha), ld),
                                            -veh.max_steer, veh.max_steer);
            return Eigen::Vector3d{veh.speed * std::cos(theta), veh.speed * std::sin(theta),
                                   veh.speed / veh.wheelbase * std::tan(steer)};
        };

        // midpoint step
        const Eigen::Vector3d k1 = derivative(pos, heading);
        const Eigen::Vector3d k2 = derivative(pos + 0.5 * veh.dt * k1.head<2>(),
                                              heading + 0.5 * veh.dt * k1[2]);
        pos += veh.dt * k2.head<2>();
        heading += veh.dt * k2[2];
    }
    return run;
}

}  // namespace

FitnessOutcome f_sim_road(const RoadSpec& road, const VehicleParams& vehicle) {
    FitnessOutcome out;
    if (!road_validity(road).valid()) {
        out.valid = false;
        out.fitness = kPenaltyFitness;
        return out;
    }
    VehicleRun run = run_vehicle(road, vehicle);
    out.trace = std::move(run.trace);
    out.fitness = -run.max_fraction_out;
    out.robustness = (1.0 - run.max_fraction_out) - 0.15;
    out.failed = out.robustness < 0;
    out.fail_segment = out.failed ? run.fail_segment : -1;
    return out;
}

std::vector<Vec2> simulate_vehicle_path(const RoadSpec& road, const VehicleParams& vehicle) {
    return run_vehicle(road, vehicle).poses;
}

FitnessFn make_oracle(const std::string& name, std::uint64_t master_seed,
                      const PlannerParams& planner) {
    if (name == "fs_uav" || name == "fsim_uav") {
        const bool simplified = name == "fs_uav";
        return [=](const Genome& g) {
            PlannerParams p = planner;
            p.rng_seed = splitmix64(master_seed ^ hash_vector(g.values));
            const ObstacleScene scene = genome_to_scene(g);
            return simplified ? f_s_uav(scene, p) : f_sim_uav(scene, p);
        };
    }
    if (name == "fs_road" || name == "fsim_road") {
        const bool simplified = name == "fs_road";
        return [=](const Genome& g) {
            const RoadSpec road = genome_to_road(g);
            return simplified ? f_s_road(road) : f_sim_road(road);
        };
    }
    throw ConfigError("unknown fitness oracle: " + name);
}

UseCase oracle_use_case(const std::string& name) {
    if (name == "fs_uav" || name == "fsim_uav") return UseCase::Uav;
    if (name == "fs_road" || name == "fsim_road") return UseCase::Ads;
    throw ConfigError("unknown fitness oracle: " + name);
}

}  // namespace scengen
