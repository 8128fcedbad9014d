#pragma once

#include "scengen/config.hpp"
#include "scengen/io.hpp"
#include "scengen/neural.hpp"

#include <string>
#include <vector>

namespace scengen {

// seed-derivation phases, one per pipeline stage
constexpr std::uint64_t kPhaseCollect = 1;
constexpr std::uint64_t kPhaseTrain = 2;
constexpr std::uint64_t kPhaseSearch = 3;
constexpr std::uint64_t kPhasePlot = 4;

/// Dataset generation: validity-checked rejection sampling (random) or
/// repeated simplified-fitness GA runs (optimized).
DatasetFile cmd_collect(const PipelineConfig& cfg, bool optimized, int count);

/// Trains on a dataset file per the config's training block.
TrainResult cmd_train(const PipelineConfig& cfg, const DatasetFile& dataset);

struct SweepRow {
    std::string sweep;  // "arch" (architecture/lr/batch grid) or "latent"
    VaeArch architecture = VaeArch::Vae3;
    Scalar learning_rate = 0;
    int batch_size = 0;
    int latent_dim = 0;
    Scalar final_val_loss = 0;
    Scalar mean_recon_distance = 0;
    Scalar max_recon_distance = 0;
    Scalar wall_time_s = 0;
};

/// Architecture/learning-rate/batch grid (18 configurations) followed by a
/// latent-size sweep, one row per trained model.
std::vector<SweepRow> cmd_train_sweep(const PipelineConfig& cfg, const DatasetFile& dataset);

std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string history_csv(const TrainHistory& history);

/// One cell of the search matrix: space in {original, latent}, algo in
/// {rs, ga1, ga2}. Latent cells need a trained model.
RunArchive cmd_search(const PipelineConfig& cfg, const std::string& space, const std::string& algo,
                      const VaeModel* model);

/// Report CSV over archive files (see make_report_csv).
std::string cmd_report(const std::vector<std::string>& archive_paths, Scalar dup_threshold = 0.025);

}  // namespace scengen
