#include "scengen/pipeline.hpp"

#include "scengen/geometry.hpp"
#include "scengen/report.hpp"

#include <sstream>

namespace scengen {

namespace {

std::function<bool(const Genome&)> validity_check(UseCase uc) {
    if (uc == UseCase::Uav)
        return [](const Genome& g) { return scene_validity(genome_to_scene(g)).valid(); };
    return [](const Genome& g) { return road_validity(genome_to_road(g)).valid(); };
}

}  // namespace

DatasetFile cmd_collect(const PipelineConfig& cfg, bool optimized, int count) {
    DatasetFile out;
    out.use_case = cfg.use_case;
    out.generator = optimized ? "optimized" : "random";
    out.seed = cfg.master_seed;
    out.bounds = cfg.bounds();

    const auto is_valid = validity_check(cfg.use_case);
    const Rng master(cfg.master_seed);

    if (!optimized) {
        Rng rng = master.derive(kPhaseCollect);
        const BoundsTable bounds = out.bounds;
        long attempts = 0;
        const long max_attempts = 1000L * count;
        while (static_cast<int>(out.genomes.size()) < count) {
            if (++attempts > max_attempts)
                throw InfeasibleError("cmd_collect: could not draw " + std::to_string(count) +
                                      " valid genomes in " + std::to_string(max_attempts) +
                                      " attempts");
            // random baseline: every parameter uniform in its global range
            // (roads too - the chained sampler only feeds the GA phases)
            Genome g;
            if (cfg.use_case == UseCase::Uav) {
                g = sample_uav_genome(rng, bounds);
            } else {
                g.values.resize(bounds.size());
                for (Eigen::Index i = 0; i < bounds.size(); ++i)
                    g.values[i] = rng.uniform(bounds.lo[i], bounds.hi[i]);
            }
            if (is_valid(g)) out.genomes.push_back(std::move(g));
        }
        return out;
    }

    const Representation repr = original_representation(cfg.use_case, out.bounds, true);
    const FitnessFn oracle =
        make_oracle(cfg.simplified_oracle(), cfg.master_seed, cfg.planner);
    out.genomes = collect_dataset(count, cfg.dataset_ga, repr, oracle, is_valid,
                                  master.derive(kPhaseCollect).seed());
    return out;
}

TrainResult cmd_train(const PipelineConfig& cfg, const DatasetFile& dataset) {
    TrainConfig tc = cfg.train;
    tc.seed = Rng(cfg.master_seed).derive(kPhaseTrain).seed();
    return train_vae(dataset.genomes, dataset.bounds, tc);
}

std::vector<SweepRow> cmd_train_sweep(const PipelineConfig& cfg, const DatasetFile& dataset) {
    std::vector<SweepRow> rows;

    auto run_one = [&](const TrainConfig& tc, const std::string& sweep) {
        TrainResult res = train_vae(dataset.genomes, dataset.bounds, tc);
        std::vector<Genome> val;
        val.reserve(res.val_indices.size());
        for (std::size_t i : res.val_indices) val.push_back(dataset.genomes[i]);
        const ReconStats recon = reconstruction_stats(res.model, val);

        SweepRow row;
        row.sweep = sweep;
        row.architecture = tc.architecture;
        row.learning_rate = tc.learning_rate;
        row.batch_size = tc.batch_size;
        row.latent_dim = res.model.latent_dim;
        row.final_val_loss = res.history.epochs.back().val_loss;
        row.mean_recon_distance = recon.mean_distance;
        row.max_recon_distance = recon.max_distance;
        row.wall_time_s = res.history.wall_time_s;
        rows.push_back(row);
    };

    const std::uint64_t seed = Rng(cfg.master_seed).derive(kPhaseTrain, 1).seed();

    // architecture / learning-rate / batch grid
    for (VaeArch arch : {VaeArch::Vae1, VaeArch::Vae2, VaeArch::Vae3}) {
        for (Scalar lr : {0.001, 0.0001}) {
            for (int batch : {64, 128, 512}) {
                TrainConfig tc = cfg.train;
                tc.architecture = arch;
                tc.learning_rate = lr;
                tc.batch_size = batch;
                tc.latent_dim = 0;
                tc.seed = seed;
                run_one(tc, "arch");
            }
        }
    }

    // latent-size sweep at the best grid setting
    const int m = static_cast<int>(dataset.bounds.size());
    for (int latent : {8, 10, 12, 14, m, m + 3}) {
        TrainConfig tc = cfg.train;
        tc.architecture = VaeArch::Vae3;
        tc.learning_rate = 0.001;
        tc.batch_size = 512;
        tc.latent_dim = latent;
        tc.seed = seed;
        run_one(tc, "latent");
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "sweep,architecture,learning_rate,batch_size,latent_dim,final_val_loss,"
           "mean_recon_distance,max_recon_distance,wall_time_s\n";
    for (const SweepRow& r : rows) {
        out << r.sweep << ',' << arch_name(r.architecture) << ',' << format_double(r.learning_rate)
            << ',' << r.batch_size << ',' << r.latent_dim << ',' << format_double(r.final_val_loss)
            << ',' << format_double(r.mean_recon_distance) << ','
            << format_double(r.max_recon_distance) << ',' << format_double(r.wall_time_s) << '\n';
    }
    return out.str();
}

std::string history_csv(const TrainHistory& history) {
    std::ostringstream out;
    out << "epoch,train_loss,val_loss,mse_term,kl_term\n";
    for (std::size_t i = 0; i < history.epochs.size(); ++i) {
        const EpochStats& e = history.epochs[i];
        out << i + 1 << ',' << format_double(e.train_loss) << ',' << format_double(e.val_loss)
            << ',' << format_double(e.mse_term) << ',' << format_double(e.kl_term) << '\n';
    }
    return out.str();
}

RunArchive cmd_search(const PipelineConfig& cfg, const std::string& space, const std::string& algo,
                      const VaeModel* model) {
    if (space != "original" && space != "latent")
        throw ConfigError("cmd_search: space must be 'original' or 'latent', got '" + space + "'");
    if (algo != "rs" && algo != "ga1" && algo != "ga2")
        throw ConfigError("cmd_search: algo must be rs, ga1 or ga2, got '" + algo + "'");
    if (space == "latent" && model == nullptr)
        throw ConfigError("cmd_search: latent space needs a trained model file");

    const FitnessFn oracle = make_oracle(cfg.oracle, cfg.master_seed, cfg.planner);
    GaConfig ga = cfg.search_ga;
    ga.seed = Rng(cfg.master_seed).derive(kPhaseSearch).seed();
    const long budget = ga.eval_budget > 0
                            ? ga.eval_budget
                            : ga.pop_size + static_cast<long>(ga.generations) * ga.offspring_count;

    RunArchive archive;
    if (space == "original") {
        const BoundsTable bounds = cfg.bounds();
        const Representation repr = original_representation(cfg.use_case, bounds, algo == "ga1");
        archive = algo == "rs" ? run_random_search(budget, repr, oracle, ga.seed)
                               : run_ga(ga, repr, oracle);
    } else {
        if (model->input_dim != static_cast<int>(cfg.bounds().size()))
            throw ConfigError("cmd_search: model input size does not match the use case");
        if (algo == "ga2") {
            archive = run_latent_search(ga, *model, oracle);
        } else {
            const Representation repr = latent_representation(*model, ga, algo == "ga1");
            const FitnessFn latent_oracle = [model, &oracle](const Genome& z) {
                return oracle(decode(*model, z));
            };
            archive = algo == "rs" ? run_random_search(budget, repr, latent_oracle, ga.seed)
                                   : run_ga(ga, repr, latent_oracle);
        }
        archive.space = "latent";
    }
    archive.use_case = cfg.use_case;
    archive.oracle = cfg.oracle;
    archive.algo = algo;
    return archive;
}

std::string cmd_report(const std::vector<std::string>& archive_paths, Scalar dup_threshold) {
    std::vector<RunArchive> archives;
    archives.reserve(archive_paths.size());
    for (const std::string& path : archive_paths) archives.push_back(read_archive(path));
    return make_report_csv(archives, dup_threshold);
}

}  // namespace scengen
