#include "scengen/config.hpp"
#include "scengen/io.hpp"
#include "scengen/metrics.hpp"
#include "scengen/pipeline.hpp"
#include "scengen/surrogate.hpp"
#include "scengen/svg.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace scengen;

constexpr int kExitConfig = 2;
constexpr int kExitFormat = 3;
constexpr int kExitInfeasible = 4;

void write_text(const std::string& path, const std::string& content) {
    if (const auto dir = std::filesystem::path(path).parent_path(); !dir.empty())
        std::filesystem::create_directories(dir);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open output file: " + path);
    out << content;
}

PipelineConfig resolve_config(const std::string& config_path, const std::string& use_case,
                              std::uint64_t seed, bool seed_given) {
    PipelineConfig cfg = config_path.empty()
                             ? default_config(use_case == "uav" ? UseCase::Uav : UseCase::Ads)
                             : load_config(config_path);
    if (seed_given) cfg.master_seed = seed;
    return cfg;
}

void ensure_parent(const std::string& path) {
    if (const auto dir = std::filesystem::path(path).parent_path(); !dir.empty())
        std::filesystem::create_directories(dir);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"latent-space scenario search for autonomous-system testing"};
    app.require_subcommand(1);

    std::string config_path;
    std::string use_case = "ads";
    std::uint64_t seed = 0;
    bool seed_given = false;
    app.add_option("--config", config_path, "pipeline config file");
    app.add_option("--use-case", use_case, "uav or ads (when no config file is given)")
        ->check(CLI::IsMember({"uav", "ads"}));
    auto* seed_opt = app.add_option("--seed", seed, "master seed override");

    // collect
    auto* collect = app.add_subcommand("collect", "generate a dataset of test genomes");
    bool random_mode = false, optimized_mode = false;
    int count = 0;
    std::string out_path;
    collect->add_flag("--random", random_mode, "uniform rejection sampling");
    collect->add_flag("--optimized", optimized_mode, "simplified-fitness GA collection");
    collect->add_option("--count", count, "dataset size (default from config)");
    collect->add_option("--out", out_path, "output path override");

    // train
    auto* train = app.add_subcommand("train", "train a VAE on a dataset");
    bool sweep = false;
    std::string dataset_path;
    std::string train_out;
    std::string history_path;
    train->add_flag("--sweep", sweep, "run the architecture and latent-size grids");
    train->add_option("--dataset", dataset_path, "dataset path override");
    train->add_option("--out", train_out, "model (or sweep CSV) path override");
    train->add_option("--history", history_path, "history CSV path (default <model>.history.csv)");

    // search
    auto* search = app.add_subcommand("search", "run one search cell and write an archive");
    std::string space = "original", algo = "ga2";
    std::string model_path;
    std::string search_out;
    long budget = 0;
    search->add_option("--space", space, "original or latent")
        ->check(CLI::IsMember({"original", "latent"}));
    search->add_option("--algo", algo, "rs, ga1 or ga2")->check(CLI::IsMember({"rs", "ga1", "ga2"}));
    search->add_option("--model", model_path, "model path override (latent space)");
    search->add_option("--budget", budget, "evaluation budget override");
    search->add_option("--out", search_out, "archive path override");

    // report
    auto* report = app.add_subcommand("report", "summarize archives into a CSV report");
    std::vector<std::string> archive_paths;
    std::string report_out;
    report->add_option("archives", archive_paths, "archive files")->required();
    report->add_option("--out", report_out, "report path override");

    // plot
    auto* plot = app.add_subcommand("plot", "render scenes, roads, traversals or boxplots");
    std::string mode = "scene";
    std::vector<std::string> plot_inputs;
    std::string plot_out = "plot.svg";
    int dim = 0;
    long index = -1;
    plot->add_option("--mode", mode, "scene, road, traversal or boxplot")
        ->check(CLI::IsMember({"scene", "road", "traversal", "boxplot"}));
    plot->add_option("inputs", plot_inputs, "archive files (scene/road/boxplot) or model file")
        ->required();
    plot->add_option("--dim", dim, "latent dimension to traverse");
    plot->add_option("--index", index, "record index (default: lowest fitness)");
    plot->add_option("--out", plot_out, "output SVG path");

    try {
        app.parse(argc, argv);
        seed_given = seed_opt->count() > 0;
        PipelineConfig cfg = resolve_config(config_path, use_case, seed, seed_given);

        if (collect->parsed()) {
            if (random_mode == optimized_mode)
                throw ConfigError("collect: pass exactly one of --random / --optimized");
            const int n = count > 0 ? count : cfg.dataset_count;
            const DatasetFile dataset = cmd_collect(cfg, optimized_mode, n);
            const std::string path = out_path.empty() ? cfg.dataset_path : out_path;
            ensure_parent(path);
            write_dataset(path, dataset);
            std::cout << "wrote " << dataset.genomes.size() << " genomes to " << path << "\n";
        } else if (train->parsed()) {
            const DatasetFile dataset =
                read_dataset(dataset_path.empty() ? cfg.dataset_path : dataset_path);
            if (sweep) {
                const auto rows = cmd_train_sweep(cfg, dataset);
                const std::string path = train_out.empty() ? cfg.model_path + ".sweep.csv" : train_out;
                write_text(path, sweep_csv(rows));
                std::cout << "wrote " << rows.size() << " sweep rows to " << path << "\n";
            } else {
                const TrainResult result = cmd_train(cfg, dataset);
                const std::string path = train_out.empty() ? cfg.model_path : train_out;
                ensure_parent(path);
                save_model(result.model, path);
                const std::string hist =
                    history_path.empty() ? path + ".history.csv" : history_path;
                write_text(hist, history_csv(result.history));
                std::cout << "wrote model to " << path << " (final val loss "
                          << format_double(result.history.epochs.back().val_loss) << ")\n";
            }
        } else if (search->parsed()) {
            if (budget > 0) cfg.search_ga.eval_budget = budget;
            VaeModel model;
            const bool latent = space == "latent";
            if (latent) model = load_model(model_path.empty() ? cfg.model_path : model_path);
            const RunArchive archive = cmd_search(cfg, space, algo, latent ? &model : nullptr);
            const std::string path = search_out.empty() ? cfg.archive_path : search_out;
            ensure_parent(path);
            write_archive(path, archive);
            std::cout << "wrote " << archive.records.size() << " evaluations to " << path << " ("
                      << count_failures(archive) << " distinct failures)\n";
        } else if (report->parsed()) {
            const std::string csv = cmd_report(archive_paths);
            const std::string path = report_out.empty() ? cfg.report_path : report_out;
            write_text(path, csv);
            std::cout << "wrote report to " << path << "\n";
        } else if (plot->parsed()) {
            if (mode == "traversal") {
                const VaeModel model = load_model(plot_inputs.front());
                write_text(plot_out, render_traversal_svg(model, dim, 7,
                                                          Rng(cfg.master_seed).derive(kPhasePlot).seed()));
            } else if (mode == "boxplot") {
                std::vector<std::pair<std::string, std::vector<Scalar>>> groups;
                for (const std::string& path : plot_inputs) {
                    const RunArchive a = read_archive(path);
                    const std::string label = a.space + "_" + a.algo;
                    auto it = std::find_if(groups.begin(), groups.end(),
                                           [&](const auto& g) { return g.first == label; });
                    if (it == groups.end()) {
                        groups.push_back({label, {}});
                        it = std::prev(groups.end());
                    }
                    it->second.push_back(static_cast<Scalar>(count_failures(a)));
                }
                write_text(plot_out, render_boxplot_svg(groups));
            } else {
                const RunArchive a = read_archive(plot_inputs.front());
                std::size_t pick = 0;
                if (index >= 0) {
                    if (index >= static_cast<long>(a.records.size()))
                        throw FormatError("plot: record index out of range");
                    pick = static_cast<std::size_t>(index);
                } else {
                    for (std::size_t i = 1; i < a.records.size(); ++i)
                        if (a.records[i].fitness < a.records[pick].fitness) pick = i;
                }
                Genome g;
                g.values = a.records[pick].phenotype;
                if (mode == "scene") {
                    const ObstacleScene scene = genome_to_scene(g);
                    PlannerParams planner = cfg.planner;
                    planner.rng_seed = splitmix64(cfg.master_seed ^ hash_vector(g.values));
                    const auto path = rrt_star(scene, planner);
                    write_text(plot_out, render_scene_svg(scene, path ? &*path : nullptr));
                } else {
                    const RoadSpec road = genome_to_road(g);
                    const auto trace = simulate_vehicle_path(road);
                    write_text(plot_out, render_road_svg(road, &trace));
                }
            }
            std::cout << "wrote " << plot_out << "\n";
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const FormatError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitFormat;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
