#include "scengen/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace scengen {

GaConfig GaConfig::dataset_defaults() {
    GaConfig c;
    c.pop_size = 200;
    c.offspring_count = 100;
    c.p_cross = 0.9;
    c.p_mut = 0.4;
    c.eta_c = 3.0;
    c.eta_m = 3.0;
    c.dup_threshold = 0.025;
    c.generations = 50;
    return c;
}

GaConfig GaConfig::search_defaults() {
    GaConfig c;
    c.pop_size = 40;
    c.offspring_count = 20;
    c.p_cross = 0.5;
    c.p_mut = 0.4;
    c.eta_c = 3.0;
    c.eta_m = 3.0;
    c.dup_threshold = 0.025;
    return c;
}

const Individual& tournament_select(const std::vector<Individual>& pop, int k, Rng& rng) {
    if (pop.empty()) throw std::invalid_argument("tournament_select: empty population");
    k = std::clamp(k, 1, static_cast<int>(pop.size()));

    // k distinct entrants via partial Fisher-Yates
    std::vector<int> idx(pop.size());
    std::iota(idx.begin(), idx.end(), 0);
    int best = -1;
    for (int i = 0; i < k; ++i) {
        const int j = rng.uniform_int(i, static_cast<int>(pop.size()) - 1);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        const int cand = idx[static_cast<std::size_t>(i)];
        if (best < 0 || pop[static_cast<std::size_t>(cand)].fitness() < pop[static_cast<std::size_t>(best)].fitness() ||
            (pop[static_cast<std::size_t>(cand)].fitness() == pop[static_cast<std::size_t>(best)].fitness() && cand < best))
            best = cand;
    }
    return pop[static_cast<std::size_t>(best)];
}

std::pair<Genome, Genome> one_point_crossover(const Genome& a, const Genome& b, Rng& rng) {
    if (a.values.size() != b.values.size() || a.values.size() < 2)
        throw std::invalid_argument("one_point_crossover: needs equal lengths >= 2");
    const int m = static_cast<int>(a.values.size());
    const int cut = rng.uniform_int(1, m - 1);
    Genome c1 = a, c2 = b;
    c1.values.tail(m - cut) = b.values.tail(m - cut);
    c2.values.tail(m - cut) = a.values.tail(m - cut);
    return {c1, c2};
}

std::pair<Individual, Individual> sbx_crossover(const Individual& a, const Individual& b,
                                                const Vector& lo, const Vector& hi, Rng& rng) {
    const Genome& ga = a.genome;
    const Genome& gb = b.genome;
    if (ga.values.size() != gb.values.size())
        throw std::invalid_argument("sbx_crossover: genome length mismatch");

    const Scalar eta = 0.5 * (a.eta_c_gene + b.eta_c_gene);
    Individual c1{ga, std::nullopt, 0.0};
    Individual c2{gb, std::nullopt, 0.0};

    for (Eigen::Index i = 0; i < ga.values.size(); ++i) {
        if (rng.uniform() > 0.5) continue;  // per-gene exchange gate
        const Scalar x1 = ga.values[i], x2 = gb.values[i];
        if (std::abs(x1 - x2) < 1e-14) continue;
        const Scalar u = rng.uniform();
        const Scalar beta = u <= 0.5 ? std::pow(2.0 * u, 1.0 / (eta + 1.0))
                                     : std::pow(1.0 / (2.0 * (1.0 - u)), 1.0 / (eta + 1.0));
        c1.genome.values[i] = std::clamp(0.5 * ((1.0 + beta) * x1 + (1.0 - beta) * x2), lo[i], hi[i]);
        c2.genome.values[i] = std::clamp(0.5 * ((1.0 - beta) * x1 + (1.0 + beta) * x2), lo[i], hi[i]);
    }

    c1.eta_c_gene = std::clamp(eta * std::exp(kSbxAdaptTau * rng.normal()), kSbxEtaMin, kSbxEtaMax);
    c2.eta_c_gene = std::clamp(eta * std::exp(kSbxAdaptTau * rng.normal()), kSbxEtaMin, kSbxEtaMax);
    return {c1, c2};
}

Genome polynomial_mutation(const Genome& g, Scalar eta_m, const Vector& lo, const Vector& hi,
                           Rng& rng, Scalar p_gene) {
    Genome out = g;
    const Eigen::Index m = g.values.size();
    const Scalar p = p_gene < 0 ? 1.0 / static_cast<Scalar>(m) : p_gene;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (rng.uniform() >= p) continue;
        const Scalar span = hi[i] - lo[i];
        if (span <= 0) continue;
        const Scalar x = out.values[i];
        const Scalar d1 = (x - lo[i]) / span;
        const Scalar d2 = (hi[i] - x) / span;
        const Scalar u = rng.uniform();
        const Scalar exp_inv = 1.0 / (eta_m + 1.0);
        Scalar dq;
        if (u < 0.5) {
            const Scalar val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta_m + 1.0);
            dq = std::pow(val, exp_inv) - 1.0;
        } else {
            const Scalar val =
                2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta_m + 1.0);
            dq = 1.0 - std::pow(val, exp_inv);
        }
        out.values[i] = std::clamp(x + dq * span, lo[i], hi[i]);
    }
    return out;
}

Genome uav_domain_mutation(const Genome& g, const BoundsTable& bounds, Rng& rng) {
    Genome out = g;
    const int n = std::clamp(static_cast<int>(std::floor(g.values[0] + 0.5)), 1, kMaxObstacles);

    enum Op { Modify, Add, Remove };
    std::vector<Op> feasible{Modify};
    if (n < kMaxObstacles) feasible.push_back(Add);
    if (n > 1) feasible.push_back(Remove);
    const Op op = feasible[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(feasible.size()) - 1))];

    auto resample_block = [&](int block) {
        for (int f = 0; f < kObstacleFields; ++f) {
            const Eigen::Index i = 1 + block * kObstacleFields + f;
            out.values[i] = rng.uniform(bounds.lo[i], bounds.hi[i]);
        }
    };

    switch (op) {
        case Modify: resample_block(rng.uniform_int(0, n - 1)); break;
        case Add:
            resample_block(n);
            out.values[0] = static_cast<Scalar>(n + 1);
            break;
        case Remove: {
            const int victim = rng.uniform_int(0, n - 1);
            if (victim != n - 1)
                out.values.segment(1 + victim * kObstacleFields, kObstacleFields) =
                    g.values.segment(1 + (n - 1) * kObstacleFields, kObstacleFields);
            out.values[0] = static_cast<Scalar>(n - 1);
            break;
        }
    }
    return out;
}

Genome road_domain_mutation(const Genome& g, const BoundsTable& bounds, Rng& rng) {
    Genome out = g;
    const Eigen::Index m = g.values.size();
    switch (rng.uniform_int(0, 3)) {
        case 0: {  // increase: scale everything up 10-20%, clamped to the global bound
            const Scalar factor = rng.uniform(1.10, 1.20);
            for (Eigen::Index i = 0; i < m; ++i)
                out.values[i] = std::clamp(g.values[i] * factor, bounds.lo[i], bounds.hi[i]);
            break;
        }
        case 1: {  // change: re-sample up to 5 values within the global bound
            const int count = rng.uniform_int(1, 5);
            for (int k = 0; k < count; ++k) {
                const int i = rng.uniform_int(0, static_cast<int>(m) - 1);
                out.values[i] = rng.uniform(bounds.lo[i], bounds.hi[i]);
            }
            break;
        }
        case 2: out.values = g.values.reverse(); break;
        case 3: out.values = -g.values; break;
    }
    return out;
}

namespace {

Scalar guarded_cosine_distance(const Vector& a, const Vector& b) {
    const Scalar na = a.norm(), nb = b.norm();
    if (na < 1e-15 && nb < 1e-15) return 0.0;
    if (na < 1e-15 || nb < 1e-15) return 1.0;
    return 1.0 - a.dot(b) / (na * nb);
}

std::vector<std::size_t> fitness_order(const std::vector<Individual>& pop) {
    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&pop](std::size_t a, std::size_t b) {
        return pop[a].fitness() < pop[b].fitness();
    });
    return order;
}

}  // namespace

std::vector<Individual> remove_duplicates(const std::vector<Individual>& pop, Scalar threshold,
                                          const std::function<Vector(const Genome&)>& dup_view) {
    std::vector<Individual> kept;
    std::vector<Vector> kept_views;
    for (std::size_t i : fitness_order(pop)) {
        Vector view = dup_view(pop[i].genome);
        bool duplicate = false;
        for (const Vector& v : kept_views) {
            if (guarded_cosine_distance(view, v) < threshold) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) {
            kept.push_back(pop[i]);
            kept_views.push_back(std::move(view));
        }
    }
    return kept;
}

namespace {

void record_eval(RunArchive& archive, const Representation& repr, const Individual& ind,
                 int generation, std::uint64_t seed) {
    EvalRecord rec;
    rec.genome = ind.genome.values;
    rec.phenotype = repr.phenotype(ind.genome);
    rec.fitness = ind.outcome->fitness;
    rec.robustness = ind.outcome->robustness;
    rec.valid = ind.outcome->valid;
    rec.failed = ind.outcome->failed;
    rec.generation = generation;
    rec.seed = seed;
    rec.fail_segment = ind.outcome->fail_segment;
    archive.records.push_back(std::move(rec));
}

}  // namespace

RunArchive run_ga(const GaConfig& cfg, const Representation& repr, const FitnessFn& fitness) {
    if (cfg.pop_size < 2) throw ConfigError("run_ga: pop_size must be >= 2");
    if (cfg.generations < 0 && cfg.eval_budget <= 0)
        throw ConfigError("run_ga: either generations or eval_budget must be set");

    RunArchive archive;
    archive.seed = cfg.seed;
    Rng rng(cfg.seed);

    const long budget = cfg.eval_budget > 0 ? cfg.eval_budget
                                            : static_cast<long>(cfg.pop_size) +
                                                  static_cast<long>(cfg.generations) * cfg.offspring_count;
    long evals = 0;

    auto evaluate = [&](Individual& ind, int generation) {
        ind.outcome = fitness(ind.genome);
        record_eval(archive, repr, ind, generation, cfg.seed);
        ++evals;
    };

    std::vector<Individual> pop;
    pop.reserve(static_cast<std::size_t>(cfg.pop_size));
    for (int i = 0; i < cfg.pop_size && evals < budget; ++i) {
        Individual ind;
        ind.genome = repr.sampler(rng);
        ind.eta_c_gene = cfg.eta_c;
        evaluate(ind, 0);
        pop.push_back(std::move(ind));
    }

    auto best_fitness = [&pop] {
        Scalar best = INFINITY;
        for (const auto& ind : pop) best = std::min(best, ind.fitness());
        return best;
    };
    archive.best_per_generation.push_back(best_fitness());

    int generation = 0;
    while (evals < budget && (cfg.generations <= 0 || generation < cfg.generations)) {
        ++generation;

        std::vector<Individual> offspring;
        offspring.reserve(static_cast<std::size_t>(cfg.offspring_count));
        while (static_cast<int>(offspring.size()) < cfg.offspring_count && evals < budget) {
            const Individual& pa = tournament_select(pop, cfg.tournament_size, rng);
            const Individual& pb = tournament_select(pop, cfg.tournament_size, rng);

            std::pair<Individual, Individual> pair;
            if (rng.uniform() < cfg.p_cross) {
                pair = repr.crossover(pa, pb, rng);
            } else {
                pair = {Individual{pa.genome, std::nullopt, pa.eta_c_gene},
                        Individual{pb.genome, std::nullopt, pb.eta_c_gene}};
            }
            for (Individual* child : {&pair.first, &pair.second}) {
                if (static_cast<int>(offspring.size()) >= cfg.offspring_count || evals >= budget)
                    break;
                if (rng.uniform() < cfg.p_mut) child->genome = repr.mutation(child->genome, rng);
                evaluate(*child, generation);
                offspring.push_back(std::move(*child));
            }
        }

        std::vector<Individual> merged = pop;
        merged.insert(merged.end(), offspring.begin(), offspring.end());
        std::vector<Individual> survivors =
            remove_duplicates(merged, cfg.dup_threshold, repr.dup_view);
        if (static_cast<int>(survivors.size()) < cfg.pop_size) {
            // refill from the duplicates so the population size stays fixed
            for (std::size_t i : fitness_order(merged)) {
                if (static_cast<int>(survivors.size()) >= cfg.pop_size) break;
                const auto same = [&](const Individual& s) {
                    return s.genome.values == merged[i].genome.values &&
                           s.fitness() == merged[i].fitness();
                };
                if (std::none_of(survivors.begin(), survivors.end(), same))
                    survivors.push_back(merged[i]);
            }
        }
        if (static_cast<int>(survivors.size()) > cfg.pop_size)
            survivors.resize(static_cast<std::size_t>(cfg.pop_size));
        pop = std::move(survivors);

        archive.best_per_generation.push_back(best_fitness());
    }

    archive.final_population = std::move(pop);
    return archive;
}

Representation original_representation(UseCase uc, const BoundsTable& bounds, bool domain_ops) {
    Representation r;
    r.phenotype = [](const Genome& g) { return g.values; };
    r.dup_view = [bounds](const Genome& g) {
        Vector v(g.values.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            const Scalar span = bounds.hi[i] - bounds.lo[i];
            v[i] = span > 0 ? (g.values[i] - bounds.lo[i]) / span : 0.0;
        }
        return v;
    };
    if (uc == UseCase::Uav) {
        r.sampler = [bounds](Rng& rng) { return sample_uav_genome(rng, bounds); };
    } else {
        r.sampler = [bounds](Rng& rng) { return sample_kappa_genome(rng, bounds); };
    }
    if (domain_ops) {
        r.crossover = [](const Individual& a, const Individual& b, Rng& rng) {
            auto [c1, c2] = one_point_crossover(a.genome, b.genome, rng);
            return std::pair{Individual{std::move(c1), std::nullopt, a.eta_c_gene},
                             Individual{std::move(c2), std::nullopt, b.eta_c_gene}};
        };
        if (uc == UseCase::Uav) {
            r.mutation = [bounds](const Genome& g, Rng& rng) {
                return uav_domain_mutation(g, bounds, rng);
            };
        } else {
            r.mutation = [bounds](const Genome& g, Rng& rng) {
                return road_domain_mutation(g, bounds, rng);
            };
        }
    } else {
        r.crossover = [bounds](const Individual& a, const Individual& b, Rng& rng) {
            return sbx_crossover(a, b, bounds.lo, bounds.hi, rng);
        };
        const Scalar eta_m = 3.0;
        r.mutation = [bounds, eta_m](const Genome& g, Rng& rng) {
            return polynomial_mutation(g, eta_m, bounds.lo, bounds.hi, rng);
        };
    }
    return r;
}

Representation latent_representation(const VaeModel& model, const GaConfig& cfg, bool domain_ops) {
    Representation r;
    const int latent_dim = model.latent_dim;
    const Vector lo = Vector::Constant(latent_dim, kLatentLo);
    const Vector hi = Vector::Constant(latent_dim, kLatentHi);

    r.sampler = [latent_dim, lo, hi](Rng& rng) {
        Genome g;
        g.space = Space::Latent;
        g.values.resize(latent_dim);
        for (int i = 0; i < latent_dim; ++i)
            g.values[i] = std::clamp(rng.normal(), kLatentLo, kLatentHi);
        return g;
    };
    r.dup_view = [](const Genome& g) { return g.values; };
    r.phenotype = [&model](const Genome& g) { return decode(model, g).values; };
    if (domain_ops) {
        // problem-specific operators lifted into the latent space: one-point
        // gene exchange plus decode -> domain edit -> encode
        const UseCase uc = model.input_dim == kUavGenomeDim ? UseCase::Uav : UseCase::Ads;
        const BoundsTable bounds = uc == UseCase::Uav ? BoundsTable::uav() : BoundsTable::road();
        r.crossover = [](const Individual& a, const Individual& b, Rng& rng) {
            auto [c1, c2] = one_point_crossover(a.genome, b.genome, rng);
            return std::pair{Individual{std::move(c1), std::nullopt, a.eta_c_gene},
                             Individual{std::move(c2), std::nullopt, b.eta_c_gene}};
        };
        r.mutation = [&model, bounds, uc](const Genome& g, Rng& rng) {
            Genome phen = decode(model, g);
            phen = uc == UseCase::Uav ? uav_domain_mutation(phen, bounds, rng)
                                      : road_domain_mutation(phen, bounds, rng);
            Genome z = encode(model, phen);
            for (Eigen::Index i = 0; i < z.values.size(); ++i)
                z.values[i] = std::clamp(z.values[i], kLatentLo, kLatentHi);
            return z;
        };
    } else {
        r.crossover = [lo, hi](const Individual& a, const Individual& b, Rng& rng) {
            return sbx_crossover(a, b, lo, hi, rng);
        };
        const Scalar eta_m = cfg.eta_m;
        r.mutation = [lo, hi, eta_m](const Genome& g, Rng& rng) {
            return polynomial_mutation(g, eta_m, lo, hi, rng);
        };
    }
    return r;
}

RunArchive run_latent_search(const GaConfig& cfg, const VaeModel& model, const FitnessFn& fitness) {
    const Representation repr = latent_representation(model, cfg);
    const FitnessFn latent_fitness = [&model, &fitness](const Genome& z) {
        return fitness(decode(model, z));
    };
    RunArchive archive = run_ga(cfg, repr, latent_fitness);
    archive.space = "latent";
    return archive;
}

RunArchive run_random_search(long budget, const Representation& repr, const FitnessFn& fitness,
                             std::uint64_t seed) {
    RunArchive archive;
    archive.seed = seed;
    archive.algo = "rs";
    Rng rng(seed);
    Scalar best = INFINITY;
    for (long i = 0; i < budget; ++i) {
        Individual ind;
        ind.genome = repr.sampler(rng);
        ind.outcome = fitness(ind.genome);
        record_eval(archive, repr, ind, 0, seed);
        best = std::min(best, ind.fitness());
        archive.final_population.push_back(std::move(ind));
    }
    archive.best_per_generation.push_back(best);
    return archive;
}

std::vector<Genome> collect_dataset(int n_total, const GaConfig& cfg, const Representation& repr,
                                    const FitnessFn& fitness,
                                    const std::function<bool(const Genome&)>& is_valid,
                                    std::uint64_t seed) {
    std::vector<Genome> dataset;
    dataset.reserve(static_cast<std::size_t>(n_total));

    const int base_runs = std::max(1, n_total / cfg.pop_size);
    const int max_runs = 4 * base_runs + 4;
    Rng master(seed);

    for (int run = 0; run < max_runs && static_cast<int>(dataset.size()) < n_total; ++run) {
        GaConfig run_cfg = cfg;
        run_cfg.seed = master.derive(0x6474u, static_cast<std::uint64_t>(run)).seed();
        RunArchive archive = run_ga(run_cfg, repr, fitness);
        for (const Individual& ind : archive.final_population) {
            if (static_cast<int>(dataset.size()) >= n_total) break;
            if (is_valid(ind.genome)) dataset.push_back(ind.genome);
        }
    }
    if (static_cast<int>(dataset.size()) < n_total)
        throw InfeasibleError("collect_dataset: only " + std::to_string(dataset.size()) + " of " +
                              std::to_string(n_total) + " valid genomes after " +
                              std::to_string(max_runs) + " runs");
    return dataset;
}

}  // namespace scengen
