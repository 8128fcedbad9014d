#pragma once

#include "scengen/domain.hpp"
#include "scengen/geometry.hpp"
#include "scengen/types.hpp"

#include <functional>
#include <optional>
#include <string>

namespace scengen {

struct PlannerParams {
    int max_iterations = 4000;
    Scalar step = 2.0;
    Scalar goal_bias = 0.1;
    Scalar neighbor_radius = 5.0;
    std::uint64_t rng_seed = 0;
};

struct TraceSample {
    Scalar t = 0;
    Scalar signal = 0;
};
using Trace = std::vector<TraceSample>;

/// One evaluated test. Fitness is minimized; failed individuals always carry
/// negative robustness. Invalid tests receive a constant penalty fitness and
/// never count as failures.
struct FitnessOutcome {
    Scalar fitness = 0;
    Scalar robustness = 0;
    bool failed = false;
    bool valid = true;
    Trace trace;
    Eigen::Index fail_segment = -1;  // centerline segment at the worst trace sample (roads)
};

/// Penalty assigned to invalid tests. All genuine fitness values of the
/// simplified and road oracles are <= 0, so this ranks strictly worst there.
constexpr Scalar kPenaltyFitness = 10.0;
/// The UAV clearance oracle produces positive fitness up to the no-obstacle
/// sentinel, so its invalid penalty must sit above that sentinel.
constexpr Scalar kClearanceSentinel = 1e6;
constexpr Scalar kUavSimPenalty = 1e7;

constexpr Scalar kUavPlanInflation = 1.3;
constexpr Scalar kUavWalkStep = 0.5;

/// Sampling-tree shortest path from mission start to goal, collision-free
/// against the scene's rectangles. Deterministic for a fixed seed. Absence of
/// a path within the iteration budget is a value, not an error.
std::optional<Polyline> rrt_star(const ObstacleScene& scene, const PlannerParams& params);

/// Simplified obstacle-scene objective: negated ratio of planned path length
/// to the straight-line distance, so longer detours score better.
FitnessOutcome f_s_uav(const ObstacleScene& scene, const PlannerParams& params);

/// Simplified road objective: negated maximum absolute curvature.
FitnessOutcome f_s_road(const RoadSpec& road);

/// Clearance oracle: plans against obstacles inflated for safety margin,
/// smooths, then walks the path recording distance to the nearest un-inflated
/// obstacle. Fails when the minimum clearance drops below 1.5 m.
FitnessOutcome f_sim_uav(const ObstacleScene& scene, const PlannerParams& params);

struct VehicleParams {
    Scalar wheelbase = 2.5;
    Scalar width = 2.0;
    Scalar lane_half_width = kLaneHalfWidth;
    Scalar speed = 12.0;
    Scalar lookahead = 8.0;
    Scalar dt = 0.01;
    Scalar max_steer = 0.1489;  // rad; caps trackable curvature at tan(.)/wheelbase = 0.06
};

/// Lane-keeping oracle: a kinematic bicycle with pure-pursuit steering tracks
/// the smoothed centerline; the trace records the in-lane percentage. Fails
/// when more than 85% of the vehicle leaves the lane at any step.
FitnessOutcome f_sim_road(const RoadSpec& road, const VehicleParams& vehicle = {});

/// Vehicle pose log for rendering (same simulation as f_sim_road).
std::vector<Vec2> simulate_vehicle_path(const RoadSpec& road, const VehicleParams& vehicle = {});

/// A named fitness oracle over original-space genomes. Evaluation seeds are
/// derived from (master seed, genome hash) so results are independent of
/// evaluation order.
using FitnessFn = std::function<FitnessOutcome(const Genome&)>;

/// Registry lookup: "fs_uav", "fsim_uav", "fs_road", "fsim_road".
FitnessFn make_oracle(const std::string& name, std::uint64_t master_seed,
                      const PlannerParams& planner = {});

UseCase oracle_use_case(const std::string& name);

}  // namespace scengen
