#pragma once

#include "scengen/domain.hpp"
#include "scengen/geometry.hpp"
#include "scengen/neural.hpp"

#include <string>
#include <utility>
#include <vector>

namespace scengen {

/// Obstacle scene with the mission leg and an optional planned path.
std::string render_scene_svg(const ObstacleScene& scene, const Polyline* path = nullptr);

/// Road with lane boundaries and an optional vehicle trace.
std::string render_road_svg(const RoadSpec& road, const std::vector<Vec2>* trace = nullptr);

/// One panel per latent value: the chosen dimension of a fixed latent vector
/// is swept across [-3, 3] and each decoded phenotype rendered side by side.
std::string render_traversal_svg(const VaeModel& model, int dim, int panels, std::uint64_t seed);

/// Box-and-whisker panel per named group of values.
std::string render_boxplot_svg(
    const std::vector<std::pair<std::string, std::vector<Scalar>>>& groups);

}  // namespace scengen
