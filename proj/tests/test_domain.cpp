#include "scengen/domain.hpp"
#include "scengen/geometry.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace scengen;

TEST_CASE("uav bounds table matches the published parameter ranges") {
    const BoundsTable t = BoundsTable::uav();
    REQUIRE(t.size() == 19);
    CHECK(t.lo[0] == 1.0);
    CHECK(t.hi[0] == 3.0);
    // block layout: x, y, l, w, h, r
    CHECK(t.lo[1] == -40.0);
    CHECK(t.hi[1] == 30.0);
    CHECK(t.lo[2] == 10.0);
    CHECK(t.hi[2] == 40.0);
    CHECK(t.lo[3] == 2.0);
    CHECK(t.hi[4] == 20.0);
    CHECK(t.lo[5] == 15.0);
    CHECK(t.hi[5] == 25.0);
    CHECK(t.lo[6] == 0.0);
    CHECK(t.hi[6] == 90.0);
    for (Eigen::Index i = 0; i < t.size(); ++i) CHECK(t.lo[i] < t.hi[i]);
}

TEST_CASE("road bounds table is 17 identical global bounds plus the relative bound") {
    const BoundsTable t = BoundsTable::road();
    REQUIRE(t.size() == 17);
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        CHECK(t.lo[i] == -0.07);
        CHECK(t.hi[i] == 0.07);
    }
    CHECK(t.relative_bound == 0.05);
}

TEST_CASE("sample_uav_genome stays in bounds with an integer count gene") {
    const BoundsTable bounds = BoundsTable::uav();
    Rng rng(42);
    for (int i = 0; i < 200; ++i) {
        const Genome g = sample_uav_genome(rng, bounds);
        REQUIRE(g.size() == 19);
        CHECK(g.space == Space::Original);
        const int n = static_cast<int>(g.values[0]);
        CHECK(g.values[0] == static_cast<Scalar>(n));
        CHECK(n >= 1);
        CHECK(n <= 3);
        CHECK(bounds.contains(g.values));
    }
}

TEST_CASE("degenerate zero-width bounds sample to the lower corner") {
    BoundsTable bounds = BoundsTable::road();
    bounds.hi = bounds.lo;
    bounds.relative_bound = 0.0;
    Rng rng(1);
    const Genome g = sample_kappa_genome(rng, bounds);
    CHECK(g.values == bounds.lo);
}

TEST_CASE("uniform sampling has uniform per-dimension moments") {
    // empirical min/max within bounds; mean within 3 standard errors of the midpoint
    const BoundsTable bounds = BoundsTable::uav();
    Rng rng(7);
    const int n = 10000;
    Vector sum = Vector::Zero(19);
    Vector lo_seen = Vector::Constant(19, INFINITY);
    Vector hi_seen = Vector::Constant(19, -INFINITY);
    for (int i = 0; i < n; ++i) {
        const Genome g = sample_uav_genome(rng, bounds);
        REQUIRE(bounds.contains(g.values));
        sum += g.values;
        lo_seen = lo_seen.cwiseMin(g.values);
        hi_seen = hi_seen.cwiseMax(g.values);
    }
    for (Eigen::Index d = 1; d < 19; ++d) {  // dimension 0 is the integer count
        const Scalar mid = 0.5 * (bounds.lo[d] + bounds.hi[d]);
        const Scalar se = (bounds.hi[d] - bounds.lo[d]) / std::sqrt(12.0 * n);
        CHECK(std::abs(sum[d] / n - mid) < 3 * se);
        CHECK(lo_seen[d] >= bounds.lo[d]);
        CHECK(hi_seen[d] <= bounds.hi[d]);
    }
}

TEST_CASE("kappa chain respects global and relative bounds simultaneously") {
    const BoundsTable bounds = BoundsTable::road();
    Rng rng(3);
    for (int i = 0; i < 2000; ++i) {
        const Genome g = sample_kappa_genome(rng, bounds);
        for (Eigen::Index k = 0; k < g.size(); ++k) {
            CHECK(std::abs(g.values[k]) <= 0.07 + 1e-12);
            if (k > 0) CHECK(std::abs(g.values[k] - g.values[k - 1]) <= 0.05 + 1e-12);
        }
    }
}

TEST_CASE("kappa chain at the upper bound samples from the clipped interval") {
    // predecessor at +0.07 leaves [0.02, 0.07]
    const BoundsTable bounds = BoundsTable::road();
    Rng rng(11);
    int hits = 0;
    for (int i = 0; i < 4000 && hits < 400; ++i) {
        const Genome g = sample_kappa_genome(rng, bounds);
        for (Eigen::Index k = 1; k < g.size(); ++k) {
            if (g.values[k - 1] > 0.0699) {
                ++hits;
                CHECK(g.values[k] >= 0.02 - 1e-9);
                CHECK(g.values[k] <= 0.07 + 1e-12);
            }
        }
    }
    CHECK(hits > 0);
}

TEST_CASE("genome_to_scene rounds and clamps the count gene") {
    const BoundsTable bounds = BoundsTable::uav();
    Rng rng(5);
    Genome g = sample_uav_genome(rng, bounds);

    g.values[0] = 1.2;
    CHECK(genome_to_scene(g).obstacles.size() == 1);
    g.values[0] = 3.0;
    CHECK(genome_to_scene(g).obstacles.size() == 3);
    g.values[0] = 3.7;  // latent decode overshoot
    CHECK(genome_to_scene(g).obstacles.size() == 3);
    g.values[0] = 0.2;
    CHECK(genome_to_scene(g).obstacles.size() == 1);
    g.values[0] = 1.5;  // round half up
    CHECK(genome_to_scene(g).obstacles.size() == 2);
}

TEST_CASE("genome_to_scene decodes obstacle blocks verbatim") {
    Genome g;
    g.values.resize(19);
    g.values << 3.0, /* obstacle 0 */ -10, 20, 4, 6, 18, 45,
        /* obstacle 1 */ 5, 30, 8, 2, 22, 0,
        /* obstacle 2 */ 0, 15, 20, 20, 15, 90;
    const ObstacleScene scene = genome_to_scene(g);
    REQUIRE(scene.obstacles.size() == 3);
    CHECK(scene.obstacles[0].cx == -10);
    CHECK(scene.obstacles[0].cy == 20);
    CHECK(scene.obstacles[0].length == 4);
    CHECK(scene.obstacles[0].width == 6);
    CHECK(scene.obstacles[0].height == 18);
    CHECK(scene.obstacles[0].rotation_deg == 45);
    CHECK(scene.obstacles[2].rotation_deg == 90);

    CHECK(scene.mission.start == Vec2{0, 0});
    CHECK(scene.mission.goal == Vec2{0, 50});
}

TEST_CASE("genome_to_scene rejects wrong lengths") {
    Genome g;
    g.values = Vector::Zero(17);
    CHECK_THROWS_WITH_AS(genome_to_scene(g), doctest::Contains("19"), std::invalid_argument);
}

TEST_CASE("genome_to_road mirrors the curvature integration") {
    Genome g;
    g.values = Vector::Zero(17);
    const RoadSpec road = genome_to_road(g);
    REQUIRE(road.polyline.size() == 18);
    CHECK(road.map_size == 200.0);
    // straight road heads +y from (100, 10)
    for (std::size_t i = 0; i < road.polyline.size(); ++i) {
        CHECK(road.polyline[i].x() == doctest::Approx(100.0));
        CHECK(road.polyline[i].y() == doctest::Approx(10.0 + 10.0 * static_cast<Scalar>(i)));
    }

    Genome bad;
    bad.values = Vector::Zero(19);
    CHECK_THROWS_AS(genome_to_road(bad), std::invalid_argument);
}

TEST_CASE("constant-curvature road points are concyclic near radius 1/kappa") {
    Genome g;
    g.values = Vector::Constant(17, 0.05);
    const RoadSpec road = genome_to_road(g);
    const auto fit = oracle::fit_circle(road.polyline);
    // the chord construction puts every vertex exactly on one circle; its
    // radius exceeds 1/kappa by the chord-vs-arc factor (1.03% at ds=10)
    CHECK(fit.max_residual < 1e-6);
    CHECK(fit.radius == doctest::Approx(20.0).epsilon(0.015));
    CHECK(fit.radius == doctest::Approx(20.206).epsilon(0.001));
}

TEST_CASE("road polyline is identical across runs") {
    Genome g;
    g.values.resize(17);
    g.values << 0.01, 0.02, 0.03, 0.04, 0.05, 0.04, 0.03, 0.02, 0.01, 0.0, -0.01, -0.02, -0.03,
        -0.04, -0.05, -0.04, -0.03;
    const RoadSpec a = genome_to_road(g);
    const RoadSpec b = genome_to_road(g);
    REQUIRE(a.polyline.size() == b.polyline.size());
    for (std::size_t i = 0; i < a.polyline.size(); ++i) CHECK(a.polyline[i] == b.polyline[i]);
    // frozen fixture: decoded once, pinned forever
    CHECK(a.polyline.back().x() == doctest::Approx(-12.60034145246367).epsilon(1e-12));
    CHECK(a.polyline.back().y() == doctest::Approx(19.224348688806177).epsilon(1e-12));
}

TEST_CASE("normalize maps endpoints and midpoint onto [-1, 1]") {
    const BoundsTable bounds = BoundsTable::uav();
    Genome g;
    g.values = bounds.lo;
    CHECK(normalize(g, bounds).values.isApproxToConstant(-1.0));
    g.values = bounds.hi;
    CHECK(normalize(g, bounds).values.isApproxToConstant(1.0));
    g.values = 0.5 * (bounds.lo + bounds.hi);
    CHECK(normalize(g, bounds).values.norm() == doctest::Approx(0.0));
}

TEST_CASE("denormalize clamps out-of-range inputs to the box") {
    const BoundsTable bounds = BoundsTable::road();
    Genome z;
    z.values = Vector::Constant(17, 1.7);
    CHECK(denormalize(z, bounds).values.isApproxToConstant(0.07));
    z.values = Vector::Constant(17, -5.0);
    CHECK(denormalize(z, bounds).values.isApproxToConstant(-0.07));
}

TEST_CASE("denormalize(normalize(.)) is the identity on in-bounds genomes") {
    const BoundsTable uav = BoundsTable::uav();
    const BoundsTable road = BoundsTable::road();
    Rng rng(13);
    for (int i = 0; i < 1000; ++i) {
        const Genome a = sample_uav_genome(rng, uav);
        const Genome b = sample_kappa_genome(rng, road);
        CHECK((denormalize(normalize(a, uav), uav).values - a.values).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((denormalize(normalize(b, road), road).values - b.values).cwiseAbs().maxCoeff() <
              1e-9);
    }
}

TEST_CASE("decoding is total over arbitrary real vectors of the right length") {
    Rng rng(99);
    for (int i = 0; i < 300; ++i) {
        Genome g;
        g.values.resize(19);
        for (int d = 0; d < 19; ++d) g.values[d] = rng.uniform(-100.0, 100.0);
        const ObstacleScene scene = genome_to_scene(g);
        CHECK(scene.obstacles.size() >= 1);
        CHECK(scene.obstacles.size() <= 3);

        Genome r;
        r.values.resize(17);
        for (int d = 0; d < 17; ++d) r.values[d] = rng.uniform(-1.0, 1.0);
        CHECK(genome_to_road(r).polyline.size() == 18);
    }
}
