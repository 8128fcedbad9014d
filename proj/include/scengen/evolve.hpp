#pragma once

#include "scengen/domain.hpp"
#include "scengen/neural.hpp"
#include "scengen/surrogate.hpp"
#include "scengen/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace scengen {

struct GaConfig {
    int pop_size = 40;
    int offspring_count = 20;
    Scalar p_cross = 0.5;
    Scalar p_mut = 0.4;
    Scalar eta_c = 3.0;
    Scalar eta_m = 3.0;
    Scalar dup_threshold = 0.025;
    int tournament_size = 2;
    int generations = 0;    // stop after this many generations (0: budget-driven)
    long eval_budget = 0;   // stop once this many evaluations were spent (0: generation-driven)
    std::uint64_t seed = 0;

    /// Dataset-collection defaults: population 200, one hundred offspring,
    /// crossover 0.9, mutation 0.4, duplicate threshold 0.025, 50 generations.
    static GaConfig dataset_defaults();
    /// Latent-search defaults: population 40, twenty offspring, crossover 0.5,
    /// mutation 0.4, duplicate threshold 0.025.
    static GaConfig search_defaults();
};

struct Individual {
    Genome genome;
    std::optional<FitnessOutcome> outcome;
    Scalar eta_c_gene = 3.0;  // self-adaptive crossover index (latent GA)

    Scalar fitness() const { return outcome->fitness; }
};

/// One executed test, as stored in the archive: the searched genome, its
/// original-space phenotype vector and the evaluation outcome.
struct EvalRecord {
    Vector genome;
    Vector phenotype;
    Scalar fitness = 0;
    Scalar robustness = 0;
    bool valid = true;
    bool failed = false;
    int generation = 0;
    std::uint64_t seed = 0;
    Eigen::Index fail_segment = -1;
};

struct RunArchive {
    std::vector<EvalRecord> records;  // every evaluation ever made
    std::vector<Individual> final_population;
    std::vector<Scalar> best_per_generation;

    UseCase use_case = UseCase::Ads;
    std::string oracle;
    std::string space = "original";
    std::string algo = "ga2";
    std::uint64_t seed = 0;
};

/// Pluggable representation for the generic engine.
struct Representation {
    std::function<Genome(Rng&)> sampler;
    std::function<std::pair<Individual, Individual>(const Individual&, const Individual&, Rng&)>
        crossover;
    std::function<Genome(const Genome&, Rng&)> mutation;
    /// View of a genome in the space where duplicate distances are measured.
    std::function<Vector(const Genome&)> dup_view;
    /// Original-space phenotype vector of a genome (identity when searching
    /// the original space, decoder composition in latent space).
    std::function<Vector(const Genome&)> phenotype;
};

/// Best-of-k by fitness (minimization) over k distinct population members;
/// ties go to the earlier population index.
const Individual& tournament_select(const std::vector<Individual>& pop, int k, Rng& rng);

/// Cut index uniform in [1, M-1]; children exchange suffixes.
std::pair<Genome, Genome> one_point_crossover(const Genome& a, const Genome& b, Rng& rng);

/// Per-gene simulated binary crossover between box bounds, using the parents'
/// mean self-adaptive index. Children inherit the index perturbed by a
/// log-normal factor and clamped to [0.5, 30].
std::pair<Individual, Individual> sbx_crossover(const Individual& a, const Individual& b,
                                                const Vector& lo, const Vector& hi, Rng& rng);

constexpr Scalar kSbxAdaptTau = 0.15;
constexpr Scalar kSbxEtaMin = 0.5;
constexpr Scalar kSbxEtaMax = 30.0;

/// Bounded polynomial mutation; each gene is perturbed independently with
/// probability p_gene (1/M when negative).
Genome polynomial_mutation(const Genome& g, Scalar eta_m, const Vector& lo, const Vector& hi,
                           Rng& rng, Scalar p_gene = -1.0);

/// One uniformly chosen feasible edit: modify one obstacle, add one (count
/// below 3) or remove one (count above 1).
Genome uav_domain_mutation(const Genome& g, const BoundsTable& bounds, Rng& rng);

/// One uniformly chosen curvature edit: scale all values up 10-20%, re-sample
/// up to 5 values, reverse the order, or flip all signs.
Genome road_domain_mutation(const Genome& g, const BoundsTable& bounds, Rng& rng);

/// Greedy sweep in fitness order: survivors' pairwise cosine distances in the
/// dup_view space all reach the threshold; the better member of a close pair
/// is kept.
std::vector<Individual> remove_duplicates(const std::vector<Individual>& pop, Scalar threshold,
                                          const std::function<Vector(const Genome&)>& dup_view);

/// Generic (mu + lambda) loop with duplicate removal on the merged pool and
/// elitist survivor selection. The archive records every evaluation.
RunArchive run_ga(const GaConfig& cfg, const Representation& repr, const FitnessFn& fitness);

/// Latent-space search: genes start from a clamped standard normal sample and
/// evolve under SBX and polynomial mutation inside [-3, 3]; evaluation decodes
/// each latent vector through the model before calling the oracle.
RunArchive run_latent_search(const GaConfig& cfg, const VaeModel& model, const FitnessFn& fitness);

/// Baseline: budget independent samples from the representation's sampler.
RunArchive run_random_search(long budget, const Representation& repr, const FitnessFn& fitness,
                             std::uint64_t seed);

/// Representation bundles for the original space.
Representation original_representation(UseCase uc, const BoundsTable& bounds, bool domain_ops);
/// Representation for the latent space of a model (vector-based operators).
Representation latent_representation(const VaeModel& model, const GaConfig& cfg,
                                     bool domain_ops = false);

/// Repeated dataset-collection runs: concatenates final populations of
/// n_total / pop_size seeded runs, keeps only genomes passing the validity
/// check and tops up from extra runs until n_total entries are available.
std::vector<Genome> collect_dataset(int n_total, const GaConfig& cfg, const Representation& repr,
                                    const FitnessFn& fitness,
                                    const std::function<bool(const Genome&)>& is_valid,
                                    std::uint64_t seed);

}  // namespace scengen
