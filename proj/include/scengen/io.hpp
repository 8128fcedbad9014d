#pragma once

#include "scengen/domain.hpp"
#include "scengen/evolve.hpp"
#include "scengen/types.hpp"

#include <string>
#include <vector>

namespace scengen {

/// Shortest decimal text that parses back to the identical double.
std::string format_double(Scalar x);
Scalar parse_double(const std::string& s);

const char* use_case_name(UseCase uc);
UseCase use_case_from_name(const std::string& s);

struct DatasetFile {
    UseCase use_case = UseCase::Ads;
    std::string generator = "random";  // random | optimized
    std::uint64_t seed = 0;
    BoundsTable bounds;
    std::vector<Genome> genomes;
};

/// Header line (JSON) followed by one line of decimal values per genome.
void write_dataset(const std::string& path, const DatasetFile& dataset);
DatasetFile read_dataset(const std::string& path);

/// Header line (JSON) followed by one JSON record per evaluation.
void write_archive(const std::string& path, const RunArchive& archive);
RunArchive read_archive(const std::string& path);

}  // namespace scengen
