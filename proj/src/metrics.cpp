#include "scengen/metrics.hpp"

#include "scengen/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace scengen {

Scalar cosine_distance(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("cosine_distance: length mismatch");
    const Scalar na = a.norm(), nb = b.norm();
    if (na < 1e-15 || nb < 1e-15)
        throw std::invalid_argument("cosine_distance: zero vector has no direction");
    return 1.0 - a.dot(b) / (na * nb);
}

const char* magnitude_letter(EffectMagnitude m) {
    switch (m) {
        case EffectMagnitude::Negligible: return "N";
        case EffectMagnitude::Small: return "S";
        case EffectMagnitude::Medium: return "M";
        case EffectMagnitude::Large: return "L";
    }
    return "N";
}

Scalar sparseness(const FailureSet& fails,
                  const std::function<Scalar(const EvalRecord&, const EvalRecord&)>& dist) {
    const std::size_t n = fails.records.size();
    if (n < 2) throw std::invalid_argument("sparseness: needs at least 2 failures");
    Scalar outer = 0;
    for (std::size_t i = 0; i < n; ++i) {
        Scalar inner = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            inner += dist(fails.records[i], fails.records[j]);
        }
        outer += inner / static_cast<Scalar>(n - 1);
    }
    return outer / static_cast<Scalar>(n);
}

namespace {

Vector range_normalized(const Vector& v, const BoundsTable& bounds) {
    Vector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const Scalar span = bounds.hi[i] - bounds.lo[i];
        out[i] = span > 0 ? (v[i] - bounds.lo[i]) / span : 0.0;
    }
    return out;
}

const BoundsTable& bounds_for(UseCase uc) {
    static const BoundsTable uav = BoundsTable::uav();
    static const BoundsTable road = BoundsTable::road();
    return uc == UseCase::Uav ? uav : road;
}

}  // namespace

Scalar uav_record_distance(const EvalRecord& a, const EvalRecord& b) {
    const BoundsTable& bounds = bounds_for(UseCase::Uav);
    return cosine_distance(range_normalized(a.phenotype, bounds),
                           range_normalized(b.phenotype, bounds));
}

Scalar sparseness(const FailureSet& fails) {
    if (fails.use_case == UseCase::Uav) return sparseness(fails, uav_record_distance);
    return sparseness(fails, road_failure_distance);
}

Scalar weighted_levenshtein(const std::vector<int>& a, const std::vector<int>& b,
                            const std::function<Scalar(int, int)>& substitution_cost,
                            Scalar indel_cost) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<Scalar> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<Scalar>(j) * indel_cost;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = static_cast<Scalar>(i) * indel_cost;
        for (std::size_t j = 1; j <= m; ++j) {
            const Scalar sub = prev[j - 1] + substitution_cost(a[i - 1], b[j - 1]);
            const Scalar del = prev[j] + indel_cost;
            const Scalar ins = cur[j - 1] + indel_cost;
            cur[j] = std::min({sub, del, ins});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

namespace {

int curvature_bin(Scalar kappa) {
    // positive curvature turns left; bins run sharp-left .. sharp-right
    if (kappa > 0.05) return 0;
    if (kappa > 0.03) return 1;
    if (kappa > 0.01) return 2;
    if (kappa >= -0.01) return 3;
    if (kappa >= -0.03) return 4;
    if (kappa >= -0.05) return 5;
    return 6;
}

}  // namespace

std::vector<int> road_failure_window(const EvalRecord& rec, int window_size) {
    if (rec.fail_segment < 0)
        throw std::invalid_argument("road_failure_window: record has no failure location");

    Genome g;
    g.values = rec.phenotype;
    const RoadSpec road = genome_to_road(g);
    const Polyline smooth = smooth_spline(road.polyline, kRoadSmoothSamples);
    const int n_seg = static_cast<int>(smooth.size()) - 1;

    // discrete per-segment curvature from heading change over mean arc step
    std::vector<Scalar> seg_kappa(static_cast<std::size_t>(n_seg), 0.0);
    for (int i = 0; i + 1 < n_seg; ++i) {
        const Vec2 d0 = smooth[static_cast<std::size_t>(i) + 1] - smooth[static_cast<std::size_t>(i)];
        const Vec2 d1 = smooth[static_cast<std::size_t>(i) + 2] - smooth[static_cast<std::size_t>(i) + 1];
        Scalar dtheta = std::atan2(d1.y(), d1.x()) - std::atan2(d0.y(), d0.x());
        while (dtheta > M_PI) dtheta -= 2 * M_PI;
        while (dtheta < -M_PI) dtheta += 2 * M_PI;
        const Scalar ds = 0.5 * (d0.norm() + d1.norm());
        seg_kappa[static_cast<std::size_t>(i)] = ds > 1e-9 ? dtheta / ds : 0.0;
    }
    if (n_seg >= 2) seg_kappa[static_cast<std::size_t>(n_seg - 1)] = seg_kappa[static_cast<std::size_t>(n_seg - 2)];

    const int start = std::clamp(static_cast<int>(rec.fail_segment) - window_size / 2, 0,
                                 std::max(0, n_seg - window_size));
    std::vector<int> labels;
    labels.reserve(static_cast<std::size_t>(window_size));
    for (int i = start; i < std::min(start + window_size, n_seg); ++i)
        labels.push_back(curvature_bin(seg_kappa[static_cast<std::size_t>(i)]));
    return labels;
}

Scalar road_failure_distance(const EvalRecord& a, const EvalRecord& b) {
    const std::vector<int> wa = road_failure_window(a, kFailureWindow);
    const std::vector<int> wb = road_failure_window(b, kFailureWindow);
    const auto sub = [](int x, int y) {
        return std::abs(x - y) / static_cast<Scalar>(kCurvatureBins - 1);
    };
    const Scalar raw = weighted_levenshtein(wa, wb, sub, 1.0);
    return raw / static_cast<Scalar>(std::max(wa.size(), wb.size()));
}

FailureSet distinct_failures(const RunArchive& archive, Scalar dup_threshold) {
    FailureSet out;
    out.use_case = archive.use_case;
    const BoundsTable& bounds = bounds_for(archive.use_case);

    // best (lowest-fitness) failures first, then a greedy cosine sweep
    std::vector<const EvalRecord*> failed;
    for (const EvalRecord& r : archive.records)
        if (r.failed) failed.push_back(&r);
    std::stable_sort(failed.begin(), failed.end(),
                     [](const EvalRecord* a, const EvalRecord* b) { return a->fitness < b->fitness; });

    std::vector<Vector> kept_views;
    for (const EvalRecord* r : failed) {
        Vector view = range_normalized(r->phenotype, bounds);
        bool duplicate = false;
        for (const Vector& v : kept_views) {
            const Scalar na = view.norm(), nb = v.norm();
            const Scalar d = (na < 1e-15 || nb < 1e-15) ? (na < 1e-15 && nb < 1e-15 ? 0.0 : 1.0)
                                                        : 1.0 - view.dot(v) / (na * nb);
            if (d < dup_threshold) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) {
            out.records.push_back(*r);
            kept_views.push_back(std::move(view));
        }
    }
    return out;
}

int count_failures(const RunArchive& archive, Scalar dup_threshold) {
    return static_cast<int>(distinct_failures(archive, dup_threshold).records.size());
}

namespace {

// Rank-sum U with average ranks for ties.
Scalar u_statistic_ranked(const std::vector<Scalar>& a, const std::vector<Scalar>& b,
                          Scalar* tie_term) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::pair<Scalar, int>> pooled;
    pooled.reserve(n + m);
    for (Scalar x : a) pooled.push_back({x, 0});
    for (Scalar x : b) pooled.push_back({x, 1});
    std::stable_sort(pooled.begin(), pooled.end(),
                     [](const auto& p, const auto& q) { return p.first < q.first; });

    Scalar rank_sum_a = 0;
    Scalar ties = 0;
    std::size_t i = 0;
    while (i < pooled.size()) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j].first == pooled[i].first) ++j;
        const Scalar avg_rank = 0.5 * static_cast<Scalar>(i + 1 + j);  // 1-based average
        const Scalar t = static_cast<Scalar>(j - i);
        ties += t * t * t - t;
        for (std::size_t k = i; k < j; ++k)
            if (pooled[k].second == 0) rank_sum_a += avg_rank;
        i = j;
    }
    if (tie_term) *tie_term = ties;
    return rank_sum_a - static_cast<Scalar>(n) * (static_cast<Scalar>(n) + 1) / 2;
}

}  // namespace

Scalar mann_whitney_statistic(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
    return u_statistic_ranked(a, b, nullptr);
}

Scalar mann_whitney_u(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
    if (a.size() < 3 || b.size() < 3)
        throw std::invalid_argument("mann_whitney_u: each sample needs at least 3 values");
    const Scalar n = static_cast<Scalar>(a.size());
    const Scalar m = static_cast<Scalar>(b.size());
    const Scalar total = n + m;

    Scalar tie_term = 0;
    const Scalar u = u_statistic_ranked(a, b, &tie_term);
    const Scalar mean_u = n * m / 2;

    const Scalar variance =
        n * m / 12.0 * ((total + 1) - tie_term / (total * (total - 1)));
    if (variance <= 0) return 1.0;  // fully tied pooled sample

    Scalar z = std::abs(u - mean_u) - 0.5;  // continuity correction
    if (z < 0) z = 0;
    z /= std::sqrt(variance);
    const Scalar p = std::erfc(z / std::sqrt(2.0));
    return std::clamp(p, 0.0, 1.0);
}

EffectMagnitude delta_magnitude(Scalar delta) {
    const Scalar d = std::abs(delta);
    if (d < 0.147) return EffectMagnitude::Negligible;
    if (d < 0.33) return EffectMagnitude::Small;
    if (d < 0.474) return EffectMagnitude::Medium;
    return EffectMagnitude::Large;
}

CliffsDelta cliffs_delta(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("cliffs_delta: samples must be non-empty");
    long above = 0, below = 0;
    for (Scalar x : a)
        for (Scalar y : b) {
            if (x > y) ++above;
            else if (x < y) ++below;
        }
    CliffsDelta out;
    out.delta = static_cast<Scalar>(above - below) /
                (static_cast<Scalar>(a.size()) * static_cast<Scalar>(b.size()));
    out.magnitude = delta_magnitude(out.delta);
    return out;
}

StatReport compare_samples(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
    StatReport r;
    r.p_value = mann_whitney_u(a, b);
    const CliffsDelta cd = cliffs_delta(a, b);
    r.cliffs_delta = cd.delta;
    r.magnitude = cd.magnitude;
    return r;
}

}  // namespace scengen
