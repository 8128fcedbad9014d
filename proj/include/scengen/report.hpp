#pragma once

#include "scengen/evolve.hpp"
#include "scengen/metrics.hpp"

#include <string>
#include <vector>

namespace scengen {

/// Per-group failure/sparseness summary plus pairwise Mann-Whitney and
/// Cliff's delta rows across groups (only for groups with enough runs).
/// Archives group by their space and algorithm labels and must share one use
/// case.
std::string make_report_csv(const std::vector<RunArchive>& archives,
                            Scalar dup_threshold = 0.025);

}  // namespace scengen
