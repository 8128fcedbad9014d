#include "scengen/neural.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>

using namespace scengen;

namespace {

BoundsTable tiny_bounds(int dims) {
    BoundsTable b;
    b.lo = Vector::Constant(dims, -2.0);
    b.hi = Vector::Constant(dims, 2.0);
    return b;
}

std::vector<Genome> synthetic_dataset(int count, int dims, std::uint64_t seed) {
    // two latent factors expanded to `dims`, plus light noise
    Rng rng(seed);
    std::vector<Genome> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const Scalar a = rng.uniform(-1.0, 1.0);
        const Scalar b = rng.uniform(-1.0, 1.0);
        Genome g;
        g.values.resize(dims);
        for (int d = 0; d < dims; ++d) {
            const Scalar phase = static_cast<Scalar>(d) / dims;
            g.values[d] = 1.4 * (a * std::sin(2 * M_PI * phase) + b * (phase - 0.5)) +
                          0.05 * rng.normal();
            g.values[d] = std::clamp(g.values[d], -2.0, 2.0);
        }
        out.push_back(std::move(g));
    }
    return out;
}

}  // namespace

TEST_CASE("architecture parameter counts match the closed form") {
    Rng rng(1);
    for (VaeArch arch : {VaeArch::Vae1, VaeArch::Vae2, VaeArch::Vae3}) {
        for (int m : {6, 17, 19}) {
            for (int latent : {4, m}) {
                const VaeModel model = make_vae(arch, m, latent, tiny_bounds(m), rng);
                CHECK(model.parameter_count() == vae_parameter_count(arch, m, latent));
            }
        }
    }
}

TEST_CASE("parameter counts sit near the published anchors for a 17-dim input") {
    // anchors are approximate; the closed form governs
    CHECK(std::abs(vae_parameter_count(VaeArch::Vae1, 17, 17) - 3019) <= 0.1 * 3019);
    CHECK(std::abs(vae_parameter_count(VaeArch::Vae2, 17, 17) - 5889) <= 0.1 * 5889);
    CHECK(std::abs(vae_parameter_count(VaeArch::Vae3, 17, 17) - 22435) <= 0.1 * 22435);
}

TEST_CASE("decoder ends in tanh and hidden layers mirror the encoder") {
    Rng rng(2);
    const VaeModel m = make_vae(VaeArch::Vae3, 17, 17, tiny_bounds(17), rng);
    REQUIRE(m.encoder.size() == 2);
    CHECK(m.encoder[0].out_dim() == 128);
    CHECK(m.encoder[1].out_dim() == 64);
    REQUIRE(m.decoder.size() == 3);
    CHECK(m.decoder[0].out_dim() == 64);
    CHECK(m.decoder[1].out_dim() == 128);
    CHECK(m.decoder.back().out_dim() == 17);
    CHECK(m.decoder.back().activation == Activation::Tanh);
    CHECK(m.mu_head.out_dim() == 17);
    CHECK(m.logvar_head.out_dim() == 17);
}

TEST_CASE("forward at the posterior mean sets z = mu") {
    Rng rng(3);
    const VaeModel m = make_vae(VaeArch::Vae1, 6, 4, tiny_bounds(6), rng);
    Matrix x(6, 3);
    for (int c = 0; c < 3; ++c)
        for (int r = 0; r < 6; ++r) x(r, c) = rng.uniform(-1.0, 1.0);
    const VaeForward f = vae_forward_mean(m, x);
    CHECK((f.z - f.mu).norm() == 0.0);
    CHECK(f.recon.rows() == 6);
    CHECK(f.recon.cols() == 3);
}

TEST_CASE("zero-initialized heads emit their bias vectors") {
    Rng rng(4);
    VaeModel m = make_vae(VaeArch::Vae1, 5, 3, tiny_bounds(5), rng);
    m.mu_head.weights.setZero();
    m.logvar_head.weights.setZero();
    m.mu_head.biases << 0.1, -0.2, 0.3;
    m.logvar_head.biases << -1.0, 0.5, 0.0;
    Matrix x = Matrix::Random(5, 2);
    const VaeForward f = vae_forward_mean(m, x);
    for (int c = 0; c < 2; ++c) {
        CHECK((f.mu.col(c) - m.mu_head.biases).norm() == 0.0);
        CHECK((f.logvar.col(c) - m.logvar_head.biases).norm() == 0.0);
    }
}

TEST_CASE("reconstructions stay strictly inside (-1, 1)") {
    Rng rng(5);
    const VaeModel m = make_vae(VaeArch::Vae2, 8, 8, tiny_bounds(8), rng);
    Matrix x(8, 1000);
    for (Eigen::Index c = 0; c < x.cols(); ++c)
        for (int r = 0; r < 8; ++r) x(r, c) = rng.uniform(-1.0, 1.0);
    const VaeForward f = vae_forward(m, x, rng);
    CHECK((f.recon.array().abs() < 1.0).all());
}

TEST_CASE("forward rejects dimension mismatches") {
    Rng rng(6);
    const VaeModel m = make_vae(VaeArch::Vae1, 5, 5, tiny_bounds(5), rng);
    CHECK_THROWS_AS(vae_forward_mean(m, Matrix::Zero(7, 1)), std::invalid_argument);

    Genome g;
    g.values = Vector::Zero(7);
    CHECK_THROWS_AS(encode(m, g), std::invalid_argument);
    CHECK_THROWS_AS(decode(m, g), std::invalid_argument);
}

TEST_CASE("elbo is zero for a perfect reconstruction at the prior") {
    const Matrix x = Matrix::Random(4, 3);
    const Matrix zero = Matrix::Zero(4, 3);
    const ElboTerms t = elbo_loss(x, x, zero, zero);
    CHECK(t.mse == 0.0);
    CHECK(t.kl == 0.0);
    CHECK(t.total == 0.0);
}

TEST_CASE("single-dimension KL at mu=1, logvar=0 is 0.5") {
    Matrix x(1, 1), recon(1, 1), mu(1, 1), logvar(1, 1);
    x << 0.0;
    recon << 0.0;
    mu << 1.0;
    logvar << 0.0;
    CHECK(elbo_loss(x, recon, mu, logvar).kl == doctest::Approx(0.5));
}

TEST_CASE("KL term is non-negative for any mu and finite logvar") {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        Matrix mu(3, 2), logvar(3, 2);
        for (int c = 0; c < 2; ++c)
            for (int r = 0; r < 3; ++r) {
                mu(r, c) = rng.uniform(-6.0, 6.0);
                logvar(r, c) = rng.uniform(-8.0, 8.0);
            }
        const Matrix zero = Matrix::Zero(3, 2);
        CHECK(elbo_loss(zero, zero, mu, logvar).kl >= 0.0);
    }
}

TEST_CASE("analytic gradient matches central finite differences") {
    Rng rng(8);
    for (int trial = 0; trial < 4; ++trial) {
        const int m_dim = rng.uniform_int(3, 6);
        const int l_dim = rng.uniform_int(2, 4);
        const VaeArch arch = trial % 2 == 0 ? VaeArch::Vae1 : VaeArch::Vae2;
        VaeModel model = make_vae(arch, m_dim, l_dim, tiny_bounds(m_dim), rng);

        Matrix x(m_dim, 5), eps(l_dim, 5);
        for (int c = 0; c < 5; ++c) {
            for (int r = 0; r < m_dim; ++r) x(r, c) = rng.uniform(-0.9, 0.9);
            for (int r = 0; r < l_dim; ++r) eps(r, c) = rng.normal();
        }

        Vector analytic;
        vae_loss_and_gradient(model, x, eps, analytic);

        VaeModel probe = model;
        const auto loss_at = [&](const Vector& params) {
            set_parameters(probe, params);
            Vector g;
            return vae_loss_and_gradient(probe, x, eps, g).total;
        };
        const Vector numeric =
            oracle::finite_difference_gradient(loss_at, flatten_parameters(model), 1e-5);

        REQUIRE(analytic.size() == numeric.size());
        for (Eigen::Index i = 0; i < analytic.size(); ++i) {
            const Scalar denom = std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-5});
            CHECK(std::abs(analytic[i] - numeric[i]) / denom < 1e-3);
        }
    }
}

TEST_CASE("adam first step moves each coordinate by about the learning rate") {
    TrainConfig cfg;
    cfg.learning_rate = 0.01;
    Vector params = Vector::Zero(4);
    Vector grads(4);
    grads << 0.5, -2.0, 1e-3, 10.0;
    AdamState state;
    adam_step(params, grads, state, cfg);
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(params[i]) <= cfg.learning_rate + 1e-12);
        CHECK(std::abs(params[i]) >= 0.999 * cfg.learning_rate);
        CHECK((params[i] < 0) == (grads[i] > 0));
    }
}

TEST_CASE("adam with zero gradient is a fixed point") {
    TrainConfig cfg;
    Vector params(3);
    params << 1.0, -2.0, 0.5;
    const Vector before = params;
    AdamState state;
    for (int i = 0; i < 5; ++i) adam_step(params, Vector::Zero(3), state, cfg);
    CHECK((params - before).norm() == 0.0);
}

TEST_CASE("adam minimizes a convex scalar") {
    TrainConfig cfg;
    cfg.learning_rate = 0.1;
    Vector w(1);
    w << 1.0;
    AdamState state;
    for (int i = 0; i < 200; ++i) {
        Vector g(1);
        g << 2.0 * w[0];
        adam_step(w, g, state, cfg);
    }
    CHECK(std::abs(w[0]) < 0.05);
}

TEST_CASE("train_vae bookkeeping, descent and determinism") {
    const auto dataset = synthetic_dataset(512, 8, 99);
    const BoundsTable bounds = tiny_bounds(8);

    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = 512;
    cfg.architecture = VaeArch::Vae1;
    cfg.seed = 17;
    const TrainResult one = train_vae(dataset, bounds, cfg);
    CHECK(one.history.epochs.size() == 1);
    CHECK(one.val_indices.size() == dataset.size() - dataset.size() * 8 / 10);

    cfg.epochs = 60;
    cfg.batch_size = 64;
    const TrainResult a = train_vae(dataset, bounds, cfg);
    CHECK(a.history.epochs.size() == 60);
    CHECK(a.history.epochs.back().val_loss < a.history.epochs.front().val_loss);

    const TrainResult b = train_vae(dataset, bounds, cfg);
    CHECK(flatten_parameters(a.model) == flatten_parameters(b.model));
    for (std::size_t e = 0; e < 60; ++e) {
        CHECK(a.history.epochs[e].train_loss == b.history.epochs[e].train_loss);
        CHECK(a.history.epochs[e].val_loss == b.history.epochs[e].val_loss);
    }

    cfg.batch_size = 1024;
    CHECK_THROWS_AS(train_vae(dataset, bounds, cfg), std::invalid_argument);
}

TEST_CASE("decode is total, deterministic and in-bounds at the prior mean") {
    Rng rng(12);
    const BoundsTable bounds = tiny_bounds(6);
    const VaeModel m = make_vae(VaeArch::Vae1, 6, 4, bounds, rng);

    Genome z;
    z.values = Vector::Zero(4);
    z.space = Space::Latent;
    const Genome g = decode(m, z);
    CHECK(g.space == Space::Original);
    CHECK(bounds.contains(g.values));
    const Genome g2 = decode(m, z);
    CHECK(g.values == g2.values);

    // encode is the posterior mean: repeatable as well
    const Genome e1 = encode(m, g);
    const Genome e2 = encode(m, g);
    CHECK(e1.values == e2.values);
    CHECK(e1.space == Space::Latent);
}

TEST_CASE("model save/load round-trips bit-exactly") {
    Rng rng(13);
    const BoundsTable bounds = tiny_bounds(7);
    const VaeModel m = make_vae(VaeArch::Vae2, 7, 5, bounds, rng);
    const std::string path = "test_model.json";
    save_model(m, path);
    const VaeModel loaded = load_model(path);
    CHECK(flatten_parameters(m) == flatten_parameters(loaded));
    CHECK(loaded.input_dim == 7);
    CHECK(loaded.latent_dim == 5);
    CHECK(loaded.architecture == VaeArch::Vae2);
    CHECK(loaded.bounds.lo == bounds.lo);

    // save -> load -> save is byte-identical
    const std::string path2 = "test_model_2.json";
    save_model(loaded, path2);
    std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
    const std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    const std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(b1 == b2);
    std::remove(path.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("model loading rejects truncated and mismatched files") {
    Rng rng(14);
    const VaeModel m = make_vae(VaeArch::Vae1, 4, 3, tiny_bounds(4), rng);
    const std::string path = "test_model_bad.json";
    save_model(m, path);

    std::ifstream in(path, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();

    {
        std::ofstream out(path, std::ios::binary);
        out << content.substr(0, content.size() / 2);
    }
    CHECK_THROWS_AS(load_model(path), FormatError);

    {
        std::ofstream out(path, std::ios::binary);
        std::string versioned = content;
        const auto pos = versioned.find("\"format_version\":1");
        REQUIRE(pos != std::string::npos);
        versioned.replace(pos, 18, "\"format_version\":9");
        out << versioned;
    }
    CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("format_version"), FormatError);
    std::remove(path.c_str());

    CHECK_THROWS_AS(load_model("does_not_exist.json"), FormatError);
}

TEST_CASE("a trained model reconstructs structured data well") {
    const auto dataset = synthetic_dataset(600, 10, 55);
    const BoundsTable bounds = tiny_bounds(10);
    TrainConfig cfg;
    cfg.epochs = 150;
    cfg.batch_size = 128;
    cfg.architecture = VaeArch::Vae3;
    cfg.seed = 5;
    const TrainResult res = train_vae(dataset, bounds, cfg);
    std::vector<Genome> val;
    for (std::size_t i : res.val_indices) val.push_back(dataset[i]);
    const ReconStats stats = reconstruction_stats(res.model, val);
    CHECK(stats.mean_distance < 0.05);
}
