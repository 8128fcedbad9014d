#pragma once

#include "scengen/domain.hpp"
#include "scengen/evolve.hpp"
#include "scengen/neural.hpp"
#include "scengen/surrogate.hpp"

#include <optional>
#include <string>

namespace scengen {

/// Everything one pipeline run needs: use case, oracle, GA blocks for both
/// phases, training setup, planner setup, file paths and the master seed.
struct PipelineConfig {
    UseCase use_case = UseCase::Ads;
    std::string oracle = "fsim_road";
    std::uint64_t master_seed = 1;

    GaConfig dataset_ga = GaConfig::dataset_defaults();
    GaConfig search_ga = GaConfig::search_defaults();
    TrainConfig train;
    PlannerParams planner;

    int dataset_count = 10000;

    std::string dataset_path = "out/dataset.txt";
    std::string model_path = "out/model.json";
    std::string archive_path = "out/archive.jsonl";
    std::string report_path = "out/report.csv";

    /// Optional override of the compiled-in parameter ranges.
    std::optional<BoundsTable> bounds_override;

    BoundsTable bounds() const {
        if (bounds_override) return *bounds_override;
        return use_case == UseCase::Uav ? BoundsTable::uav() : BoundsTable::road();
    }
    std::string simplified_oracle() const {
        return use_case == UseCase::Uav ? "fs_uav" : "fs_road";
    }
};

/// Parse a sectioned key-value file; unknown sections or keys are errors.
/// All defaults match the compiled-in GA and training tables.
PipelineConfig load_config(const std::string& path);

/// Defaults with the use-case specific evaluation budget applied.
PipelineConfig default_config(UseCase uc);

}  // namespace scengen
