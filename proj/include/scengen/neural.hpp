#pragma once

#include "scengen/domain.hpp"
#include "scengen/types.hpp"

#include <string>
#include <vector>

namespace scengen {

enum class Activation { Relu, Tanh, Identity };

struct MlpLayer {
    Matrix weights;  // out x in
    Vector biases;   // out
    Activation activation = Activation::Identity;

    Eigen::Index in_dim() const { return weights.cols(); }
    Eigen::Index out_dim() const { return weights.rows(); }
};

enum class VaeArch { Vae1, Vae2, Vae3 };

const char* arch_name(VaeArch a);
VaeArch arch_from_name(const std::string& name);

/// Encoder hidden sizes for an architecture; the decoder mirrors them in
/// reverse. Vae1: one hidden layer of twice the input size. Vae2: two such
/// layers. Vae3: hidden layers of 128 and 64.
std::vector<int> arch_hidden_sizes(VaeArch a, int input_dim);

/// Closed-form trainable parameter count for the given shape.
long vae_parameter_count(VaeArch a, int input_dim, int latent_dim);

/// Encoder/decoder MLP pair with normalization bounds. The decoder ends in
/// tanh, so raw outputs live in (-1, 1) and map back through denormalize.
struct VaeModel {
    std::vector<MlpLayer> encoder;  // shared trunk, ReLU
    MlpLayer mu_head;               // linear
    MlpLayer logvar_head;           // linear
    std::vector<MlpLayer> decoder;  // ReLU hidden, tanh output
    int input_dim = 0;
    int latent_dim = 0;
    VaeArch architecture = VaeArch::Vae3;
    BoundsTable bounds;

    long parameter_count() const;
};

/// Freshly initialized model (Glorot-uniform weights, zero biases).
VaeModel make_vae(VaeArch arch, int input_dim, int latent_dim, const BoundsTable& bounds,
                  Rng& rng);

struct TrainConfig {
    int epochs = 1000;
    int batch_size = 512;
    Scalar learning_rate = 0.001;
    Scalar adam_beta1 = 0.9;
    Scalar adam_beta2 = 0.999;
    Scalar adam_eps = 1e-8;
    std::uint64_t seed = 0;
    VaeArch architecture = VaeArch::Vae3;
    int latent_dim = 0;  // 0 -> input dimension
};

struct EpochStats {
    Scalar train_loss = 0;
    Scalar val_loss = 0;
    Scalar mse_term = 0;  // validation reconstruction term
    Scalar kl_term = 0;   // validation KL term
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
    Scalar wall_time_s = 0;
};

/// Forward pass over a batch (one sample per column).
struct VaeForward {
    Matrix recon;
    Matrix mu;
    Matrix logvar;
    Matrix z;
};

/// Reparameterized forward: z = mu + exp(0.5*logvar) .* eps, eps ~ N(0, I).
VaeForward vae_forward(const VaeModel& m, const Matrix& x, Rng& rng);
/// Deterministic forward at the posterior mean (eps = 0).
VaeForward vae_forward_mean(const VaeModel& m, const Matrix& x);

struct ElboTerms {
    Scalar total = 0;
    Scalar mse = 0;
    Scalar kl = 0;
};

/// Reconstruction error averaged over batch and dimensions plus the KL
/// divergence to the unit-normal prior averaged over the batch.
ElboTerms elbo_loss(const Matrix& x, const Matrix& recon, const Matrix& mu, const Matrix& logvar);

/// Flat views of all trainable parameters, in a fixed layer order.
Vector flatten_parameters(const VaeModel& m);
void set_parameters(VaeModel& m, const Vector& params);

/// Loss and gradient of the full ELBO at fixed reparameterization noise.
ElboTerms vae_loss_and_gradient(const VaeModel& m, const Matrix& x, const Matrix& eps,
                                Vector& grad);

struct AdamState {
    Vector m;
    Vector v;
    long step = 0;
};

/// Bias-corrected Adam update.
void adam_step(Vector& params, const Vector& grads, AdamState& state, const TrainConfig& cfg);

struct TrainResult {
    VaeModel model;
    TrainHistory history;
    std::vector<std::size_t> val_indices;  // validation rows of the input dataset
};

/// Normalizes the dataset, splits 80/20 train/validation by seeded shuffle and
/// runs mini-batch Adam. Deterministic for a fixed config seed.
TrainResult train_vae(const std::vector<Genome>& dataset, const BoundsTable& bounds,
                      const TrainConfig& cfg);

/// Posterior mean of a genome (deterministic).
Genome encode(const VaeModel& m, const Genome& g);
/// Decode a latent vector to an in-bounds original-space genome. Total over
/// all real vectors of the right length.
Genome decode(const VaeModel& m, const Genome& z);

void save_model(const VaeModel& m, const std::string& path);
VaeModel load_model(const std::string& path);

struct ReconStats {
    Scalar mean_distance = 0;
    Scalar max_distance = 0;
};

/// Cosine distance between each genome and its decode(encode(.)) image,
/// measured on range-normalized vectors.
ReconStats reconstruction_stats(const VaeModel& m, const std::vector<Genome>& genomes);

}  // namespace scengen
