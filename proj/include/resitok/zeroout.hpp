#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "resitok/rng.hpp"

namespace resitok {

// Tiny MLP autoencoder: p -> hidden -> N*d latent -> hidden -> p, tanh
// between the affine pairs. Latents are continuous; the zero-out masking
// operates on whole d-dimensional token slots.
struct TinyAutoencoder {
    uint32_t p = 64;        // flattened patch size
    uint32_t tokens = 16;   // N latent token slots
    uint32_t dim = 4;       // d per-token dimension
    uint32_t hidden = 128;

    // Row-major weight matrices (out x in) and bias vectors.
    std::vector<double> w1, b1;  // p -> hidden
    std::vector<double> w2, b2;  // hidden -> N*d
    std::vector<double> w3, b3;  // N*d -> hidden
    std::vector<double> w4, b4;  // hidden -> p

    uint32_t latent_size() const { return tokens * dim; }

    static TinyAutoencoder init(uint32_t p, uint32_t tokens, uint32_t dim, uint32_t hidden,
                                uint64_t seed);

    // Little-endian binary: magic "RTAE", u32 p, N, d, hidden, then the
    // weight tensors row-major float32 (w1 b1 w2 b2 w3 b3 w4 b4).
    void save(const std::string& path) const;
    static TinyAutoencoder load(const std::string& path);
};

struct TrainConfig {
    uint32_t key_count = 4;  // |y_K|
    uint32_t batch_size = 32;
    double learning_rate = 0.05;
    uint32_t steps = 2000;
    uint64_t seed = 1;
};

// Gradients with the same shapes as the model weights.
struct Gradients {
    std::vector<double> w1, b1, w2, b2, w3, b3, w4, b4;
};

// Truncation point drawn uniformly from {key_count, ..., total} inclusive.
uint32_t sample_truncation(uint32_t key_count, uint32_t total, Rng& rng);

// Latent slots >= t replaced by zeros; slots are d-dim vectors.
std::vector<double> zero_out(std::span<const double> latents, uint32_t t, uint32_t tokens,
                             uint32_t dim);

// Mean squared reconstruction error of a batch with latents zeroed beyond t.
double masked_mse(const TinyAutoencoder& model, std::span<const double> batch, size_t batch_count,
                  uint32_t t);

// Forward + analytic backward pass for one batch at truncation t. Returns
// the loss; gradients (if non-null) receive d(loss)/d(weights).
double loss_and_gradients(const TinyAutoencoder& model, std::span<const double> batch,
                          size_t batch_count, uint32_t t, Gradients* grads);

// One zero-out training step: sample t, mask, MSE, gradient-descent update.
// Returns the pre-update loss. Throws TrainingError on non-finite loss.
double train_step(TinyAutoencoder& model, std::span<const double> batch, size_t batch_count,
                  const TrainConfig& cfg, Rng& rng);

// Mean reconstruction MSE per truncation point over a dataset.
std::vector<std::pair<uint32_t, double>> evaluate_information_gradient(
    const TinyAutoencoder& model, std::span<const double> dataset, size_t sample_count,
    std::span<const uint32_t> t_values);

// Synthetic low-rank patch dataset (fixed smooth basis, few active
// components per patch). Deterministic per seed.
std::vector<double> make_lowrank_patches(uint32_t p, size_t count, uint64_t seed);

// Patch blob: magic "RTPD", u32 count, u32 p, float32 data.
void save_patches(const std::string& path, std::span<const double> data, size_t count, uint32_t p);
std::vector<double> load_patches(const std::string& path, size_t* count, uint32_t* p);

}  // namespace resitok
