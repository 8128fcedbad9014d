#include "scengen/neural.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <numeric>

namespace scengen {

using nlohmann::json;

const char* arch_name(VaeArch a) {
    switch (a) {
        case VaeArch::Vae1: return "vae1";
        case VaeArch::Vae2: return "vae2";
        case VaeArch::Vae3: return "vae3";
    }
    return "vae3";
}

VaeArch arch_from_name(const std::string& name) {
    if (name == "vae1") return VaeArch::Vae1;
    if (name == "vae2") return VaeArch::Vae2;
    if (name == "vae3") return VaeArch::Vae3;
    throw ConfigError("unknown VAE architecture: " + name);
}

std::vector<int> arch_hidden_sizes(VaeArch a, int input_dim) {
    switch (a) {
        case VaeArch::Vae1: return {2 * input_dim};
        case VaeArch::Vae2: return {2 * input_dim, 2 * input_dim};
        case VaeArch::Vae3: return {128, 64};
    }
    return {};
}

long vae_parameter_count(VaeArch a, int input_dim, int latent_dim) {
    const auto hidden = arch_hidden_sizes(a, input_dim);
    auto dense = [](int in, int out) { return static_cast<long>(out) * in + out; };
    long count = 0;
    int in = input_dim;
    for (int h : hidden) {
        count += dense(in, h);
        in = h;
    }
    count += 2 * dense(in, latent_dim);  // mu and logvar heads
    in = latent_dim;
    for (auto it = hidden.rbegin(); it != hidden.rend(); ++it) {
        count += dense(in, *it);
        in = *it;
    }
    count += dense(in, input_dim);
    return count;
}

long VaeModel::parameter_count() const {
    long count = 0;
    auto add = [&count](const MlpLayer& l) { count += l.weights.size() + l.biases.size(); };
    for (const auto& l : encoder) add(l);
    add(mu_head);
    add(logvar_head);
    for (const auto& l : decoder) add(l);
    return count;
}

namespace {

MlpLayer make_layer(int in, int out, Activation act, Rng& rng) {
    MlpLayer l;
    l.activation = act;
    l.weights.resize(out, in);
    const Scalar a = std::sqrt(6.0 / (in + out));
    for (Eigen::Index j = 0; j < l.weights.cols(); ++j)
        for (Eigen::Index i = 0; i < l.weights.rows(); ++i) l.weights(i, j) = rng.uniform(-a, a);
    l.biases = Vector::Zero(out);
    return l;
}

Matrix apply_activation(Activation act, const Matrix& pre) {
    switch (act) {
        case Activation::Relu: return pre.cwiseMax(0.0);
        case Activation::Tanh: return pre.array().tanh().matrix();
        case Activation::Identity: return pre;
    }
    return pre;
}

// Derivative expressed through the layer output (valid for all three kinds).
Matrix activation_grad(Activation act, const Matrix& out, const Matrix& d_out) {
    switch (act) {
        case Activation::Relu:
            return (out.array() > 0.0).select(d_out, Matrix::Zero(out.rows(), out.cols()));
        case Activation::Tanh: return (d_out.array() * (1.0 - out.array().square())).matrix();
        case Activation::Identity: return d_out;
    }
    return d_out;
}

struct LayerCache {
    Matrix in;
    Matrix out;
};

Matrix forward_layer(const MlpLayer& l, const Matrix& x, LayerCache* cache) {
    Matrix pre = (l.weights * x).colwise() + l.biases;
    Matrix out = apply_activation(l.activation, pre);
    if (cache) {
        cache->in = x;
        cache->out = out;
    }
    return out;
}

std::vector<const MlpLayer*> layer_list(const VaeModel& m) {
    std::vector<const MlpLayer*> layers;
    for (const auto& l : m.encoder) layers.push_back(&l);
    layers.push_back(&m.mu_head);
    layers.push_back(&m.logvar_head);
    for (const auto& l : m.decoder) layers.push_back(&l);
    return layers;
}

std::vector<MlpLayer*> layer_list(VaeModel& m) {
    std::vector<MlpLayer*> layers;
    for (auto& l : m.encoder) layers.push_back(&l);
    layers.push_back(&m.mu_head);
    layers.push_back(&m.logvar_head);
    for (auto& l : m.decoder) layers.push_back(&l);
    return layers;
}

}  // namespace

VaeModel make_vae(VaeArch arch, int input_dim, int latent_dim, const BoundsTable& bounds,
                  Rng& rng) {
    VaeModel m;
    m.architecture = arch;
    m.input_dim = input_dim;
    m.latent_dim = latent_dim;
    m.bounds = bounds;

    const auto hidden = arch_hidden_sizes(arch, input_dim);
    int in = input_dim;
    for (int h : hidden) {
        m.encoder.push_back(make_layer(in, h, Activation::Relu, rng));
        in = h;
    }
    m.mu_head = make_layer(in, latent_dim, Activation::Identity, rng);
    m.logvar_head = make_layer(in, latent_dim, Activation::Identity, rng);
    in = latent_dim;
    for (auto it = hidden.rbegin(); it != hidden.rend(); ++it) {
        m.decoder.push_back(make_layer(in, *it, Activation::Relu, rng));
        in = *it;
    }
    m.decoder.push_back(make_layer(in, input_dim, Activation::Tanh, rng));
    return m;
}

namespace {

VaeForward forward_impl(const VaeModel& m, const Matrix& x, const Matrix* eps,
                        std::vector<LayerCache>* enc_caches, Matrix* trunk_out,
                        std::vector<LayerCache>* dec_caches) {
    if (x.rows() != m.input_dim)
        throw std::invalid_argument("vae_forward: input dimension " + std::to_string(x.rows()) +
                                    ", model expects " + std::to_string(m.input_dim));
    VaeForward f;
    Matrix h = x;
    if (enc_caches) enc_caches->resize(m.encoder.size());
    for (std::size_t i = 0; i < m.encoder.size(); ++i)
        h = forward_layer(m.encoder[i], h, enc_caches ? &(*enc_caches)[i] : nullptr);
    if (trunk_out) *trunk_out = h;

    f.mu = (m.mu_head.weights * h).colwise() + m.mu_head.biases;
    f.logvar = (m.logvar_head.weights * h).colwise() + m.logvar_head.biases;

    if (eps) {
        f.z = f.mu + ((0.5 * f.logvar.array()).exp() * eps->array()).matrix();
    } else {
        f.z = f.mu;
    }

    Matrix d = f.z;
    if (dec_caches) dec_caches->resize(m.decoder.size());
    for (std::size_t i = 0; i < m.decoder.size(); ++i)
        d = forward_layer(m.decoder[i], d, dec_caches ? &(*dec_caches)[i] : nullptr);
    f.recon = d;
    return f;
}

}  // namespace

VaeForward vae_forward(const VaeModel& m, const Matrix& x, Rng& rng) {
    Matrix eps(m.latent_dim, x.cols());
    for (Eigen::Index c = 0; c < eps.cols(); ++c)
        for (Eigen::Index r = 0; r < eps.rows(); ++r) eps(r, c) = rng.normal();
    return forward_impl(m, x, &eps, nullptr, nullptr, nullptr);
}

VaeForward vae_forward_mean(const VaeModel& m, const Matrix& x) {
    return forward_impl(m, x, nullptr, nullptr, nullptr, nullptr);
}

ElboTerms elbo_loss(const Matrix& x, const Matrix& recon, const Matrix& mu,
                    const Matrix& logvar) {
    ElboTerms t;
    // Reconstruction summed over dimensions, KL averaged over dimensions (both
    // averaged over the batch). A KL term at full per-sample weight drowns the
    // reconstruction signal on this data and collapses the posterior.
    t.mse = (recon - x).squaredNorm() / static_cast<Scalar>(x.cols());
    t.kl = -0.5 *
           (1.0 + logvar.array() - mu.array().square() - logvar.array().exp()).sum() /
           static_cast<Scalar>(logvar.size());
    t.total = t.mse + t.kl;
    return t;
}

Vector flatten_parameters(const VaeModel& m) {
    Vector out(m.parameter_count());
    Eigen::Index off = 0;
    for (const MlpLayer* l : layer_list(m)) {
        std::copy(l->weights.data(), l->weights.data() + l->weights.size(), out.data() + off);
        off += l->weights.size();
        std::copy(l->biases.data(), l->biases.data() + l->biases.size(), out.data() + off);
        off += l->biases.size();
    }
    return out;
}

void set_parameters(VaeModel& m, const Vector& params) {
    if (params.size() != m.parameter_count())
        throw std::invalid_argument("set_parameters: size mismatch");
    Eigen::Index off = 0;
    for (MlpLayer* l : layer_list(m)) {
        std::copy(params.data() + off, params.data() + off + l->weights.size(),
                  l->weights.data());
        off += l->weights.size();
        std::copy(params.data() + off, params.data() + off + l->biases.size(), l->biases.data());
        off += l->biases.size();
    }
}

ElboTerms vae_loss_and_gradient(const VaeModel& m, const Matrix& x, const Matrix& eps,
                                Vector& grad) {
    std::vector<LayerCache> enc_caches, dec_caches;
    Matrix trunk;
    VaeForward f = forward_impl(m, x, &eps, &enc_caches, &trunk, &dec_caches);
    const ElboTerms terms = elbo_loss(x, f.recon, f.mu, f.logvar);

    grad = Vector::Zero(m.parameter_count());

    // gradient segment offsets, in flatten order
    const auto layers = layer_list(m);
    std::vector<Eigen::Index> w_off(layers.size()), b_off(layers.size());
    Eigen::Index off = 0;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        w_off[i] = off;
        off += layers[i]->weights.size();
        b_off[i] = off;
        off += layers[i]->biases.size();
    }
    auto write_layer_grad = [&](std::size_t idx, const Matrix& d_pre, const Matrix& in) {
        Eigen::Map<Matrix>(grad.data() + w_off[idx], layers[idx]->weights.rows(),
                           layers[idx]->weights.cols())
            .noalias() = d_pre * in.transpose();
        Eigen::Map<Vector>(grad.data() + b_off[idx], layers[idx]->biases.size()) =
            d_pre.rowwise().sum();
    };

    const std::size_t n_enc = m.encoder.size();
    const std::size_t mu_idx = n_enc;
    const std::size_t lv_idx = n_enc + 1;
    const std::size_t dec_base = n_enc + 2;

    Matrix d_cur = 2.0 / static_cast<Scalar>(x.cols()) * (f.recon - x);

    for (std::size_t i = m.decoder.size(); i-- > 0;) {
        const MlpLayer& l = m.decoder[i];
        const LayerCache& c = dec_caches[i];
        Matrix d_pre = activation_grad(l.activation, c.out, d_cur);
        write_layer_grad(dec_base + i, d_pre, c.in);
        d_cur.noalias() = l.weights.transpose() * d_pre;
    }

    // reparameterization and KL
    const Scalar kl_w = 1.0 / static_cast<Scalar>(f.logvar.size());
    const Matrix sigma = (0.5 * f.logvar.array()).exp().matrix();
    Matrix d_mu = d_cur + kl_w * f.mu;
    Matrix d_lv = (d_cur.array() * eps.array() * 0.5 * sigma.array()).matrix() +
                  (0.5 * kl_w) * (f.logvar.array().exp() - 1.0).matrix();

    write_layer_grad(mu_idx, d_mu, trunk);
    write_layer_grad(lv_idx, d_lv, trunk);

    d_cur.noalias() =
        m.mu_head.weights.transpose() * d_mu + m.logvar_head.weights.transpose() * d_lv;

    for (std::size_t i = m.encoder.size(); i-- > 0;) {
        const MlpLayer& l = m.encoder[i];
        const LayerCache& c = enc_caches[i];
        Matrix d_pre = activation_grad(l.activation, c.out, d_cur);
        write_layer_grad(i, d_pre, c.in);
        d_cur.noalias() = l.weights.transpose() * d_pre;
    }

    return terms;
}

void adam_step(Vector& params, const Vector& grads, AdamState& state, const TrainConfig& cfg) {
    if (state.m.size() != params.size()) {
        state.m = Vector::Zero(params.size());
        state.v = Vector::Zero(params.size());
        state.step = 0;
    }
    state.step += 1;
    state.m = cfg.adam_beta1 * state.m + (1.0 - cfg.adam_beta1) * grads;
    state.v = cfg.adam_beta2 * state.v.array().matrix() +
              (1.0 - cfg.adam_beta2) * grads.array().square().matrix();
    const Scalar bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<Scalar>(state.step));
    const Scalar bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<Scalar>(state.step));
    params.array() -= cfg.learning_rate * (state.m.array() / bc1) /
                      ((state.v.array() / bc2).sqrt() + cfg.adam_eps);
}

TrainResult train_vae(const std::vector<Genome>& dataset, const BoundsTable& bounds,
                      const TrainConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    if (dataset.empty()) throw std::invalid_argument("train_vae: empty dataset");
    if (static_cast<int>(dataset.size()) < cfg.batch_size)
        throw std::invalid_argument("train_vae: dataset size " + std::to_string(dataset.size()) +
                                    " smaller than batch size " + std::to_string(cfg.batch_size));

    const int input_dim = static_cast<int>(dataset.front().size());
    const int latent_dim = cfg.latent_dim > 0 ? cfg.latent_dim : input_dim;

    Matrix all(input_dim, static_cast<Eigen::Index>(dataset.size()));
    for (std::size_t i = 0; i < dataset.size(); ++i)
        all.col(static_cast<Eigen::Index>(i)) = normalize(dataset[i], bounds).values;

    Rng rng(cfg.seed);

    // seeded shuffle, then 80/20 split
    std::vector<Eigen::Index> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))]);

    const Eigen::Index n_train =
        std::max<Eigen::Index>(1, static_cast<Eigen::Index>(dataset.size() * 8 / 10));
    const Eigen::Index n_val = static_cast<Eigen::Index>(dataset.size()) - n_train;

    Matrix x_train(input_dim, n_train);
    for (Eigen::Index i = 0; i < n_train; ++i) x_train.col(i) = all.col(order[static_cast<std::size_t>(i)]);
    Matrix x_val(input_dim, std::max<Eigen::Index>(n_val, 0));
    for (Eigen::Index i = 0; i < n_val; ++i)
        x_val.col(i) = all.col(order[static_cast<std::size_t>(n_train + i)]);

    TrainResult result;
    result.model = make_vae(cfg.architecture, input_dim, latent_dim, bounds, rng);

    Vector params = flatten_parameters(result.model);
    Vector grad;
    AdamState adam;

    std::vector<Eigen::Index> batch_order(static_cast<std::size_t>(n_train));
    std::iota(batch_order.begin(), batch_order.end(), 0);

    result.history.epochs.reserve(static_cast<std::size_t>(cfg.epochs));
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = batch_order.size(); i > 1; --i)
            std::swap(batch_order[i - 1],
                      batch_order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))]);

        // epoch losses accumulate batch means over the loader
        Scalar train_loss = 0;
        for (Eigen::Index start = 0; start < n_train; start += cfg.batch_size) {
            const Eigen::Index b = std::min<Eigen::Index>(cfg.batch_size, n_train - start);
            Matrix xb(input_dim, b);
            for (Eigen::Index i = 0; i < b; ++i)
                xb.col(i) = x_train.col(batch_order[static_cast<std::size_t>(start + i)]);
            Matrix eps(latent_dim, b);
            for (Eigen::Index c = 0; c < b; ++c)
                for (Eigen::Index r = 0; r < latent_dim; ++r) eps(r, c) = rng.normal();

            const ElboTerms terms = vae_loss_and_gradient(result.model, xb, eps, grad);
            train_loss += terms.total;
            adam_step(params, grad, adam, cfg);
            set_parameters(result.model, params);
        }

        EpochStats stats;
        stats.train_loss = train_loss;
        if (n_val > 0) {
            Scalar val_total = 0, val_mse = 0, val_kl = 0;
            for (Eigen::Index start = 0; start < n_val; start += cfg.batch_size) {
                const Eigen::Index b = std::min<Eigen::Index>(cfg.batch_size, n_val - start);
                const Matrix xb = x_val.middleCols(start, b);
                const VaeForward vf = vae_forward_mean(result.model, xb);
                const ElboTerms vt = elbo_loss(xb, vf.recon, vf.mu, vf.logvar);
                val_total += vt.total;
                val_mse += vt.mse * static_cast<Scalar>(b);
                val_kl += vt.kl * static_cast<Scalar>(b);
            }
            stats.val_loss = val_total;
            stats.mse_term = val_mse / static_cast<Scalar>(n_val);  // per-sample diagnostics
            stats.kl_term = val_kl / static_cast<Scalar>(n_val);
        }
        result.history.epochs.push_back(stats);
    }

    result.val_indices.reserve(static_cast<std::size_t>(n_val));
    for (Eigen::Index i = 0; i < n_val; ++i)
        result.val_indices.push_back(static_cast<std::size_t>(order[static_cast<std::size_t>(n_train + i)]));

    result.history.wall_time_s =
        std::chrono::duration<Scalar>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

ReconStats reconstruction_stats(const VaeModel& m, const std::vector<Genome>& genomes) {
    ReconStats stats;
    if (genomes.empty()) return stats;
    auto unit_range = [&m](const Vector& v) {
        Vector out(v.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            const Scalar span = m.bounds.hi[i] - m.bounds.lo[i];
            out[i] = span > 0 ? (v[i] - m.bounds.lo[i]) / span : 0.0;
        }
        return out;
    };
    Scalar sum = 0;
    for (const Genome& g : genomes) {
        const Genome recon = decode(m, encode(m, g));
        const Vector a = unit_range(g.values);
        const Vector b = unit_range(recon.values);
        const Scalar na = a.norm(), nb = b.norm();
        const Scalar d = (na < 1e-15 || nb < 1e-15) ? (na < 1e-15 && nb < 1e-15 ? 0.0 : 1.0)
                                                    : 1.0 - a.dot(b) / (na * nb);
        sum += d;
        stats.max_distance = std::max(stats.max_distance, d);
    }
    stats.mean_distance = sum / static_cast<Scalar>(genomes.size());
    return stats;
}

Genome encode(const VaeModel& m, const Genome& g) {
    if (g.values.size() != m.input_dim)
        throw std::invalid_argument("encode: genome length " + std::to_string(g.values.size()) +
                                    ", model expects " + std::to_string(m.input_dim));
    const VaeForward f = vae_forward_mean(m, normalize(g, m.bounds).values);
    Genome out;
    out.values = f.mu.col(0);
    out.space = Space::Latent;
    return out;
}

Genome decode(const VaeModel& m, const Genome& z) {
    if (z.values.size() != m.latent_dim)
        throw std::invalid_argument("decode: latent length " + std::to_string(z.values.size()) +
                                    ", model expects " + std::to_string(m.latent_dim));
    Matrix d = z.values;
    for (const auto& l : m.decoder) d = forward_layer(l, d, nullptr);
    Genome out;
    out.values = d.col(0);
    out.space = Space::Original;
    return denormalize(out, m.bounds);
}

namespace {

constexpr int kModelFormatVersion = 1;

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::Relu: return "relu";
        case Activation::Tanh: return "tanh";
        case Activation::Identity: return "identity";
    }
    return "identity";
}

Activation activation_from_name(const std::string& s) {
    if (s == "relu") return Activation::Relu;
    if (s == "tanh") return Activation::Tanh;
    if (s == "identity") return Activation::Identity;
    throw FormatError("model file: unknown activation '" + s + "'");
}

json layer_to_json(const MlpLayer& l) {
    json j;
    j["activation"] = activation_name(l.activation);
    j["out"] = l.weights.rows();
    j["in"] = l.weights.cols();
    std::vector<Scalar> w;
    w.reserve(static_cast<std::size_t>(l.weights.size()));
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
        for (Eigen::Index c = 0; c < l.weights.cols(); ++c) w.push_back(l.weights(r, c));
    j["weights"] = w;
    j["biases"] = std::vector<Scalar>(l.biases.data(), l.biases.data() + l.biases.size());
    return j;
}

MlpLayer layer_from_json(const json& j, const std::string& where) {
    MlpLayer l;
    l.activation = activation_from_name(j.at("activation").get<std::string>());
    const Eigen::Index out = j.at("out").get<Eigen::Index>();
    const Eigen::Index in = j.at("in").get<Eigen::Index>();
    const auto w = j.at("weights").get<std::vector<Scalar>>();
    const auto b = j.at("biases").get<std::vector<Scalar>>();
    if (static_cast<Eigen::Index>(w.size()) != out * in)
        throw FormatError("model file: " + where + ".weights has " + std::to_string(w.size()) +
                          " entries, expected " + std::to_string(out * in));
    if (static_cast<Eigen::Index>(b.size()) != out)
        throw FormatError("model file: " + where + ".biases has " + std::to_string(b.size()) +
                          " entries, expected " + std::to_string(out));
    l.weights.resize(out, in);
    for (Eigen::Index r = 0; r < out; ++r)
        for (Eigen::Index c = 0; c < in; ++c)
            l.weights(r, c) = w[static_cast<std::size_t>(r * in + c)];
    l.biases = Eigen::Map<const Vector>(b.data(), out);
    return l;
}

}  // namespace

void save_model(const VaeModel& m, const std::string& path) {
    json j;
    j["format_version"] = kModelFormatVersion;
    j["architecture"] = arch_name(m.architecture);
    j["input_dim"] = m.input_dim;
    j["latent_dim"] = m.latent_dim;
    j["bounds"] = {
        {"lo", std::vector<Scalar>(m.bounds.lo.data(), m.bounds.lo.data() + m.bounds.lo.size())},
        {"hi", std::vector<Scalar>(m.bounds.hi.data(), m.bounds.hi.data() + m.bounds.hi.size())},
        {"relative_bound", m.bounds.relative_bound}};
    json enc = json::array(), dec = json::array();
    for (const auto& l : m.encoder) enc.push_back(layer_to_json(l));
    for (const auto& l : m.decoder) dec.push_back(layer_to_json(l));
    j["encoder"] = std::move(enc);
    j["decoder"] = std::move(dec);
    j["mu_head"] = layer_to_json(m.mu_head);
    j["logvar_head"] = layer_to_json(m.logvar_head);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open model file for writing: " + path);
    out << j.dump() << '\n';
}

VaeModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open model file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError("model file '" + path + "' is not valid JSON: " + e.what());
    }
    try {
        const int version = j.at("format_version").get<int>();
        if (version != kModelFormatVersion)
            throw FormatError("model file '" + path + "': format_version " +
                              std::to_string(version) + " unsupported (expected " +
                              std::to_string(kModelFormatVersion) + ")");
        VaeModel m;
        m.architecture = arch_from_name(j.at("architecture").get<std::string>());
        m.input_dim = j.at("input_dim").get<int>();
        m.latent_dim = j.at("latent_dim").get<int>();
        const auto& jb = j.at("bounds");
        const auto lo = jb.at("lo").get<std::vector<Scalar>>();
        const auto hi = jb.at("hi").get<std::vector<Scalar>>();
        if (lo.size() != hi.size())
            throw FormatError("model file: bounds.lo and bounds.hi lengths differ");
        m.bounds.lo = Eigen::Map<const Vector>(lo.data(), static_cast<Eigen::Index>(lo.size()));
        m.bounds.hi = Eigen::Map<const Vector>(hi.data(), static_cast<Eigen::Index>(hi.size()));
        m.bounds.relative_bound = jb.at("relative_bound").get<Scalar>();

        int idx = 0;
        for (const auto& jl : j.at("encoder"))
            m.encoder.push_back(layer_from_json(jl, "encoder[" + std::to_string(idx++) + "]"));
        m.mu_head = layer_from_json(j.at("mu_head"), "mu_head");
        m.logvar_head = layer_from_json(j.at("logvar_head"), "logvar_head");
        idx = 0;
        for (const auto& jl : j.at("decoder"))
            m.decoder.push_back(layer_from_json(jl, "decoder[" + std::to_string(idx++) + "]"));

        if (m.decoder.empty() || m.decoder.back().out_dim() != m.input_dim)
            throw FormatError("model file: decoder output dimension does not match input_dim");
        if (m.mu_head.out_dim() != m.latent_dim || m.logvar_head.out_dim() != m.latent_dim)
            throw FormatError("model file: head output dimension does not match latent_dim");
        return m;
    } catch (const json::exception& e) {
        throw FormatError("model file '" + path + "': " + e.what());
    }
}

}  // namespace scengen
