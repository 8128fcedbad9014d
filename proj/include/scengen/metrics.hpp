#pragma once

#include "scengen/evolve.hpp"
#include "scengen/types.hpp"

#include <functional>
#include <vector>

namespace scengen {

/// 1 - cos(a, b), in [0, 2]. Zero-length inputs are an error.
Scalar cosine_distance(const Vector& a, const Vector& b);

enum class EffectMagnitude { Negligible, Small, Medium, Large };

const char* magnitude_letter(EffectMagnitude m);

struct StatReport {
    Scalar p_value = 1.0;
    Scalar cliffs_delta = 0.0;
    EffectMagnitude magnitude = EffectMagnitude::Negligible;
};

/// Failure records of one archive after duplicate collapsing.
struct FailureSet {
    std::vector<EvalRecord> records;
    UseCase use_case = UseCase::Ads;
};

/// Mean over failures of the mean distance to every other failure. Needs at
/// least two failures.
Scalar sparseness(const FailureSet& fails,
                  const std::function<Scalar(const EvalRecord&, const EvalRecord&)>& dist);

/// Use-case specific sparseness: cosine distance over range-normalized
/// genomes for obstacle scenes, failure-window edit distance for roads.
Scalar sparseness(const FailureSet& fails);

/// Distance used when comparing two obstacle-scene tests.
Scalar uav_record_distance(const EvalRecord& a, const EvalRecord& b);

/// Edit distance between the curvature-labeled road windows around the two
/// failure locations, normalized to [0, 1].
Scalar road_failure_distance(const EvalRecord& a, const EvalRecord& b);

/// Curvature-bin labels (0..6, sharp-left through sharp-right) for the window
/// of smoothed road segments centered on the record's failure location.
std::vector<int> road_failure_window(const EvalRecord& rec, int window_size = 8);

/// Generic weighted edit distance (not normalized).
Scalar weighted_levenshtein(const std::vector<int>& a, const std::vector<int>& b,
                            const std::function<Scalar(int, int)>& substitution_cost,
                            Scalar indel_cost);

constexpr int kCurvatureBins = 7;
constexpr int kFailureWindow = 8;

/// Distinct failures of an archive: failed records collapsed at the duplicate
/// threshold in the normalized phenotype space.
FailureSet distinct_failures(const RunArchive& archive, Scalar dup_threshold = 0.025);

/// Number of distinct failures in an archive.
int count_failures(const RunArchive& archive, Scalar dup_threshold = 0.025);

/// Two-sided Mann-Whitney U test p-value (normal approximation with tie and
/// continuity corrections). Needs at least 3 values per sample.
Scalar mann_whitney_u(const std::vector<Scalar>& a, const std::vector<Scalar>& b);

/// The U statistic itself (ties counted half).
Scalar mann_whitney_statistic(const std::vector<Scalar>& a, const std::vector<Scalar>& b);

struct CliffsDelta {
    Scalar delta = 0.0;
    EffectMagnitude magnitude = EffectMagnitude::Negligible;
};

CliffsDelta cliffs_delta(const std::vector<Scalar>& a, const std::vector<Scalar>& b);

EffectMagnitude delta_magnitude(Scalar delta);

/// Mann-Whitney p plus Cliff's delta in one record.
StatReport compare_samples(const std::vector<Scalar>& a, const std::vector<Scalar>& b);

}  // namespace scengen
