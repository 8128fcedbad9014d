#include "scengen/io.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace scengen {

using nlohmann::json;

std::string format_double(Scalar x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

Scalar parse_double(const std::string& s) {
    Scalar x = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw FormatError("not a number: '" + s + "'");
    return x;
}

const char* use_case_name(UseCase uc) { return uc == UseCase::Uav ? "uav" : "ads"; }

UseCase use_case_from_name(const std::string& s) {
    if (s == "uav") return UseCase::Uav;
    if (s == "ads") return UseCase::Ads;
    throw FormatError("unknown use case: '" + s + "'");
}

namespace {

json bounds_to_json(const BoundsTable& b) {
    return {{"lo", std::vector<Scalar>(b.lo.data(), b.lo.data() + b.lo.size())},
            {"hi", std::vector<Scalar>(b.hi.data(), b.hi.data() + b.hi.size())},
            {"relative_bound", b.relative_bound}};
}

BoundsTable bounds_from_json(const json& j) {
    BoundsTable b;
    const auto lo = j.at("lo").get<std::vector<Scalar>>();
    const auto hi = j.at("hi").get<std::vector<Scalar>>();
    if (lo.size() != hi.size()) throw FormatError("bounds lo/hi lengths differ");
    b.lo = Eigen::Map<const Vector>(lo.data(), static_cast<Eigen::Index>(lo.size()));
    b.hi = Eigen::Map<const Vector>(hi.data(), static_cast<Eigen::Index>(hi.size()));
    b.relative_bound = j.at("relative_bound").get<Scalar>();
    return b;
}

}  // namespace

void write_dataset(const std::string& path, const DatasetFile& dataset) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open dataset file for writing: " + path);
    json header;
    header["format"] = "dataset";
    header["use_case"] = use_case_name(dataset.use_case);
    header["generator"] = dataset.generator;
    header["seed"] = dataset.seed;
    header["count"] = dataset.genomes.size();
    header["bounds"] = bounds_to_json(dataset.bounds);
    out << header.dump() << '\n';
    for (const Genome& g : dataset.genomes) {
        for (Eigen::Index i = 0; i < g.values.size(); ++i) {
            if (i) out << ' ';
            out << format_double(g.values[i]);
        }
        out << '\n';
    }
}

DatasetFile read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open dataset file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("dataset file '" + path + "' is empty");

    DatasetFile dataset;
    std::size_t count = 0;
    try {
        const json header = json::parse(line);
        if (header.value("format", "") != "dataset")
            throw FormatError("dataset file '" + path + "': missing format tag");
        dataset.use_case = use_case_from_name(header.at("use_case").get<std::string>());
        dataset.generator = header.at("generator").get<std::string>();
        dataset.seed = header.at("seed").get<std::uint64_t>();
        count = header.at("count").get<std::size_t>();
        dataset.bounds = bounds_from_json(header.at("bounds"));
    } catch (const json::exception& e) {
        throw FormatError("dataset file '" + path + "': bad header: " + e.what());
    }

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Genome g;
        std::vector<Scalar> values;
        std::istringstream ss(line);
        std::string token;
        while (ss >> token) values.push_back(parse_double(token));
        g.values = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
        g.space = Space::Original;
        if (g.values.size() != dataset.bounds.size())
            throw FormatError("dataset file '" + path + "': record length " +
                              std::to_string(g.values.size()) + " does not match bounds size " +
                              std::to_string(dataset.bounds.size()));
        dataset.genomes.push_back(std::move(g));
    }
    if (dataset.genomes.size() != count)
        throw FormatError("dataset file '" + path + "': header count " + std::to_string(count) +
                          " does not match " + std::to_string(dataset.genomes.size()) + " records");
    return dataset;
}

namespace {

std::vector<Scalar> to_std(const Vector& v) {
    return std::vector<Scalar>(v.data(), v.data() + v.size());
}

Vector from_std(const std::vector<Scalar>& v) {
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

void write_archive(const std::string& path, const RunArchive& archive) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open archive file for writing: " + path);
    json header;
    header["format"] = "archive";
    header["use_case"] = use_case_name(archive.use_case);
    header["oracle"] = archive.oracle;
    header["space"] = archive.space;
    header["algo"] = archive.algo;
    header["seed"] = archive.seed;
    header["count"] = archive.records.size();
    out << header.dump() << '\n';
    for (const EvalRecord& r : archive.records) {
        json j;
        j["genome"] = to_std(r.genome);
        j["phenotype"] = to_std(r.phenotype);
        j["fitness"] = r.fitness;
        j["robustness"] = r.robustness;
        j["valid"] = r.valid;
        j["failed"] = r.failed;
        j["generation"] = r.generation;
        j["seed"] = r.seed;
        j["fail_segment"] = r.fail_segment;
        out << j.dump() << '\n';
    }
}

RunArchive read_archive(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open archive file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("archive file '" + path + "' is empty");

    RunArchive archive;
    std::size_t count = 0;
    try {
        const json header = json::parse(line);
        if (header.value("format", "") != "archive")
            throw FormatError("archive file '" + path + "': missing format tag");
        archive.use_case = use_case_from_name(header.at("use_case").get<std::string>());
        archive.oracle = header.at("oracle").get<std::string>();
        archive.space = header.at("space").get<std::string>();
        archive.algo = header.at("algo").get<std::string>();
        archive.seed = header.at("seed").get<std::uint64_t>();
        count = header.at("count").get<std::size_t>();
    } catch (const json::exception& e) {
        throw FormatError("archive file '" + path + "': bad header: " + e.what());
    }

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            EvalRecord r;
            r.genome = from_std(j.at("genome").get<std::vector<Scalar>>());
            r.phenotype = from_std(j.at("phenotype").get<std::vector<Scalar>>());
            r.fitness = j.at("fitness").get<Scalar>();
            r.robustness = j.at("robustness").get<Scalar>();
            r.valid = j.at("valid").get<bool>();
            r.failed = j.at("failed").get<bool>();
            r.generation = j.at("generation").get<int>();
            r.seed = j.at("seed").get<std::uint64_t>();
            r.fail_segment = j.at("fail_segment").get<Eigen::Index>();
            archive.records.push_back(std::move(r));
        } catch (const json::exception& e) {
            throw FormatError("archive file '" + path + "' line " + std::to_string(line_no) +
                              ": " + e.what());
        }
    }
    if (archive.records.size() != count)
        throw FormatError("archive file '" + path + "': header count " + std::to_string(count) +
                          " does not match " + std::to_string(archive.records.size()) +
                          " records");
    return archive;
}

}  // namespace scengen
