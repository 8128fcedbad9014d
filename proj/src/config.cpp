#include "scengen/config.hpp"

#include "scengen/io.hpp"

#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace scengen {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' expects an integer, got '" + value + "'");
    }
}

Scalar parse_real(const std::string& key, const std::string& value) {
    try {
        return parse_double(value);
    } catch (const FormatError&) {
        throw ConfigError("config: key '" + key + "' expects a number, got '" + value + "'");
    }
}

void apply_ga(GaConfig& ga, const std::string& key, const std::string& value,
              const std::string& section) {
    const std::string full = section + "." + key;
    if (key == "pop_size") ga.pop_size = static_cast<int>(parse_int(full, value));
    else if (key == "offspring") ga.offspring_count = static_cast<int>(parse_int(full, value));
    else if (key == "p_cross") ga.p_cross = parse_real(full, value);
    else if (key == "p_mut") ga.p_mut = parse_real(full, value);
    else if (key == "eta_c") ga.eta_c = parse_real(full, value);
    else if (key == "eta_m") ga.eta_m = parse_real(full, value);
    else if (key == "dup_threshold") ga.dup_threshold = parse_real(full, value);
    else if (key == "tournament") ga.tournament_size = static_cast<int>(parse_int(full, value));
    else if (key == "generations") ga.generations = static_cast<int>(parse_int(full, value));
    else if (key == "budget") ga.eval_budget = parse_int(full, value);
    else throw ConfigError("config: unknown key '" + full + "'");
}

Vector parse_vector(const std::string& key, const std::string& value) {
    std::vector<Scalar> values;
    std::istringstream ss(value);
    std::string token;
    while (ss >> token) values.push_back(parse_real(key, token));
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void validate(const PipelineConfig& cfg) {
    if (cfg.dataset_ga.pop_size < 2 || cfg.search_ga.pop_size < 2)
        throw ConfigError("config: pop_size must be >= 2");
    for (const GaConfig* ga : {&cfg.dataset_ga, &cfg.search_ga}) {
        if (ga->p_cross < 0 || ga->p_cross > 1 || ga->p_mut < 0 || ga->p_mut > 1)
            throw ConfigError("config: probabilities must lie in [0, 1]");
        if (ga->dup_threshold <= 0) throw ConfigError("config: dup_threshold must be > 0");
    }
    if (cfg.train.batch_size < 1 || cfg.train.epochs < 1)
        throw ConfigError("config: train.batch_size and train.epochs must be >= 1");
    if (oracle_use_case(cfg.oracle) != cfg.use_case)
        throw ConfigError("config: oracle '" + cfg.oracle + "' does not match use_case");
    const std::set<std::string> paths{cfg.dataset_path, cfg.model_path, cfg.archive_path,
                                      cfg.report_path};
    if (paths.size() != 4) throw ConfigError("config: output paths must be distinct");
    if (cfg.bounds_override) {
        const BoundsTable& b = *cfg.bounds_override;
        const Eigen::Index expected = cfg.use_case == UseCase::Uav ? kUavGenomeDim : kRoadGenomeDim;
        if (b.lo.size() != expected || b.hi.size() != expected)
            throw ConfigError("config: bounds need " + std::to_string(expected) +
                              " entries for this use case");
        if ((b.lo.array() >= b.hi.array()).any())
            throw ConfigError("config: bounds.lo must be strictly below bounds.hi");
    }
}

}  // namespace

PipelineConfig default_config(UseCase uc) {
    PipelineConfig cfg;
    cfg.use_case = uc;
    if (uc == UseCase::Uav) {
        cfg.oracle = "fsim_uav";
        cfg.search_ga.eval_budget = 200;
    } else {
        cfg.oracle = "fsim_road";
        cfg.search_ga.eval_budget = 2000;
    }
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);

    PipelineConfig cfg;
    bool budget_set = false;
    bool oracle_set = false;
    std::optional<std::string> bounds_lo, bounds_hi, bounds_rb;
    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(line_no) + ": bad section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (section == "pipeline") {
            if (key == "use_case") {
                try {
                    cfg.use_case = use_case_from_name(value);
                } catch (const FormatError& e) {
                    throw ConfigError(std::string("config: ") + e.what());
                }
            } else if (key == "oracle") {
                cfg.oracle = value;
                oracle_set = true;
            } else if (key == "master_seed") {
                cfg.master_seed = static_cast<std::uint64_t>(parse_int("pipeline.master_seed", value));
            } else if (key == "dataset_count") {
                cfg.dataset_count = static_cast<int>(parse_int("pipeline.dataset_count", value));
            } else {
                throw ConfigError("config: unknown key 'pipeline." + key + "'");
            }
        } else if (section == "paths") {
            if (key == "dataset") cfg.dataset_path = value;
            else if (key == "model") cfg.model_path = value;
            else if (key == "archive") cfg.archive_path = value;
            else if (key == "report") cfg.report_path = value;
            else throw ConfigError("config: unknown key 'paths." + key + "'");
        } else if (section == "dataset_ga") {
            apply_ga(cfg.dataset_ga, key, value, section);
        } else if (section == "search_ga") {
            apply_ga(cfg.search_ga, key, value, section);
            if (key == "budget") budget_set = true;
        } else if (section == "train") {
            if (key == "epochs") cfg.train.epochs = static_cast<int>(parse_int("train.epochs", value));
            else if (key == "batch_size") cfg.train.batch_size = static_cast<int>(parse_int("train.batch_size", value));
            else if (key == "learning_rate") cfg.train.learning_rate = parse_real("train.learning_rate", value);
            else if (key == "adam_beta1") cfg.train.adam_beta1 = parse_real("train.adam_beta1", value);
            else if (key == "adam_beta2") cfg.train.adam_beta2 = parse_real("train.adam_beta2", value);
            else if (key == "adam_eps") cfg.train.adam_eps = parse_real("train.adam_eps", value);
            else if (key == "architecture") cfg.train.architecture = arch_from_name(value);
            else if (key == "latent_dim") cfg.train.latent_dim = static_cast<int>(parse_int("train.latent_dim", value));
            else throw ConfigError("config: unknown key 'train." + key + "'");
        } else if (section == "bounds") {
            // resolved after the parse so section order cannot matter
            if (key == "lo") bounds_lo = value;
            else if (key == "hi") bounds_hi = value;
            else if (key == "relative_bound") bounds_rb = value;
            else throw ConfigError("config: unknown key 'bounds." + key + "'");
        } else if (section == "planner") {
            if (key == "max_iterations") cfg.planner.max_iterations = static_cast<int>(parse_int("planner.max_iterations", value));
            else if (key == "step") cfg.planner.step = parse_real("planner.step", value);
            else if (key == "goal_bias") cfg.planner.goal_bias = parse_real("planner.goal_bias", value);
            else if (key == "neighbor_radius") cfg.planner.neighbor_radius = parse_real("planner.neighbor_radius", value);
            else throw ConfigError("config: unknown key 'planner." + key + "'");
        } else {
            throw ConfigError("config: unknown section '" + section + "'");
        }
    }

    if (!oracle_set) cfg.oracle = cfg.use_case == UseCase::Uav ? "fsim_uav" : "fsim_road";
    if (!budget_set && cfg.search_ga.generations <= 0)
        cfg.search_ga.eval_budget = cfg.use_case == UseCase::Uav ? 200 : 2000;
    if (bounds_lo || bounds_hi || bounds_rb) {
        BoundsTable b = cfg.bounds();
        if (bounds_lo) b.lo = parse_vector("bounds.lo", *bounds_lo);
        if (bounds_hi) b.hi = parse_vector("bounds.hi", *bounds_hi);
        if (bounds_rb) b.relative_bound = parse_real("bounds.relative_bound", *bounds_rb);
        cfg.bounds_override = std::move(b);
    }
    validate(cfg);
    return cfg;
}

}  // namespace scengen
