#include "resitok/zeroout.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>

#include "resitok/errors.hpp"

namespace resitok {

namespace {

// y = W x + b, W is (rows x cols) row-major.
void affine(const std::vector<double>& w, const std::vector<double>& b, const double* x,
            double* y, uint32_t rows, uint32_t cols) {
    for (uint32_t r = 0; r < rows; ++r) {
        double acc = b[r];
        const double* wr = w.data() + static_cast<size_t>(r) * cols;
        for (uint32_t c = 0; c < cols; ++c) acc += wr[c] * x[c];
        y[r] = acc;
    }
}

// Accumulate dL/dW += dy * x^T and dL/db += dy; returns dL/dx into dx.
void affine_backward(const std::vector<double>& w, const double* x, const double* dy,
                     std::vector<double>* dw, std::vector<double>* db, double* dx, uint32_t rows,
                     uint32_t cols) {
    if (dx) std::fill(dx, dx + cols, 0.0);
    for (uint32_t r = 0; r < rows; ++r) {
        (*db)[r] += dy[r];
        double* dwr = dw->data() + static_cast<size_t>(r) * cols;
        const double* wr = w.data() + static_cast<size_t>(r) * cols;
        for (uint32_t c = 0; c < cols; ++c) {
            dwr[c] += dy[r] * x[c];
            if (dx) dx[c] += wr[c] * dy[r];
        }
    }
}

std::vector<double> uniform_init(size_t n, double scale, Rng& rng) {
    std::vector<double> v(n);
    for (double& x : v) x = scale * (2.0 * rng.uniform() - 1.0);
    return v;
}

void write_tensor_f32(std::ofstream& f, const std::vector<double>& v) {
    std::vector<float> tmp(v.begin(), v.end());
    f.write(reinterpret_cast<const char*>(tmp.data()),
            static_cast<std::streamsize>(tmp.size() * sizeof(float)));
}

std::vector<double> read_tensor_f32(std::ifstream& f, size_t n, const std::string& path) {
    std::vector<float> tmp(n);
    f.read(reinterpret_cast<char*>(tmp.data()), static_cast<std::streamsize>(n * sizeof(float)));
    if (!f) throw IoError("truncated checkpoint: " + path);
    return std::vector<double>(tmp.begin(), tmp.end());
}

}  // namespace

TinyAutoencoder TinyAutoencoder::init(uint32_t p, uint32_t tokens, uint32_t dim, uint32_t hidden,
                                      uint64_t seed) {
    TinyAutoencoder m;
    m.p = p;
    m.tokens = tokens;
    m.dim = dim;
    m.hidden = hidden;
    Rng rng(seed);
    const uint32_t latent = m.latent_size();
    m.w1 = uniform_init(static_cast<size_t>(hidden) * p, std::sqrt(1.0 / p), rng);
    m.b1.assign(hidden, 0.0);
    m.w2 = uniform_init(static_cast<size_t>(latent) * hidden, std::sqrt(1.0 / hidden), rng);
    m.b2.assign(latent, 0.0);
    m.w3 = uniform_init(static_cast<size_t>(hidden) * latent, std::sqrt(1.0 / latent), rng);
    m.b3.assign(hidden, 0.0);
    m.w4 = uniform_init(static_cast<size_t>(p) * hidden, std::sqrt(1.0 / hidden), rng);
    m.b4.assign(p, 0.0);
    return m;
}

void TinyAutoencoder::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f.write("RTAE", 4);
    const uint32_t header[4] = {p, tokens, dim, hidden};
    f.write(reinterpret_cast<const char*>(header), sizeof(header));
    for (const auto* t : {&w1, &b1, &w2, &b2, &w3, &b3, &w4, &b4}) write_tensor_f32(f, *t);
    if (!f) throw IoError("write failed: " + path);
}

TinyAutoencoder TinyAutoencoder::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "RTAE", 4) != 0) throw IoError("bad checkpoint magic: " + path);
    uint32_t header[4];
    f.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!f) throw IoError("truncated checkpoint header: " + path);
    TinyAutoencoder m;
    m.p = header[0];
    m.tokens = header[1];
    m.dim = header[2];
    m.hidden = header[3];
    const uint32_t latent = m.latent_size();
    m.w1 = read_tensor_f32(f, static_cast<size_t>(m.hidden) * m.p, path);
    m.b1 = read_tensor_f32(f, m.hidden, path);
    m.w2 = read_tensor_f32(f, static_cast<size_t>(latent) * m.hidden, path);
    m.b2 = read_tensor_f32(f, latent, path);
    m.w3 = read_tensor_f32(f, static_cast<size_t>(m.hidden) * latent, path);
    m.b3 = read_tensor_f32(f, m.hidden, path);
    m.w4 = read_tensor_f32(f, static_cast<size_t>(m.p) * m.hidden, path);
    m.b4 = read_tensor_f32(f, m.p, path);
    return m;
}

uint32_t sample_truncation(uint32_t key_count, uint32_t total, Rng& rng) {
    if (key_count > total) throw ArgumentError("sample_truncation: key_count > total");
    const uint32_t span = total - key_count + 1;  // inclusive both ends
    return key_count + static_cast<uint32_t>(rng.uniform_int(span));
}

std::vector<double> zero_out(std::span<const double> latents, uint32_t t, uint32_t tokens,
                             uint32_t dim) {
    if (t > tokens) throw ArgumentError("zero_out: t exceeds token count");
    if (latents.size() != static_cast<size_t>(tokens) * dim) {
        throw ArgumentError("zero_out: latent size mismatch");
    }
    std::vector<double> out(latents.begin(), latents.end());
    std::fill(out.begin() + static_cast<size_t>(t) * dim, out.end(), 0.0);
    return out;
}

double loss_and_gradients(const TinyAutoencoder& model, std::span<const double> batch,
                          size_t batch_count, uint32_t t, Gradients* grads) {
    if (batch_count == 0) throw ArgumentError("empty batch");
    if (batch.size() != batch_count * model.p) throw ArgumentError("batch shape mismatch");
    if (t > model.tokens) throw ArgumentError("t exceeds token count");

    const uint32_t p = model.p, hidden = model.hidden, latent = model.latent_size();
    const size_t masked_from = static_cast<size_t>(t) * model.dim;

    if (grads) {
        grads->w1.assign(model.w1.size(), 0.0);
        grads->b1.assign(model.b1.size(), 0.0);
        grads->w2.assign(model.w2.size(), 0.0);
        grads->b2.assign(model.b2.size(), 0.0);
        grads->w3.assign(model.w3.size(), 0.0);
        grads->b3.assign(model.b3.size(), 0.0);
        grads->w4.assign(model.w4.size(), 0.0);
        grads->b4.assign(model.b4.size(), 0.0);
    }

    std::vector<double> a1(hidden), h1(hidden), z(latent), a2(hidden), h2(hidden), y(p);
    std::vector<double> dy(p), dh2(hidden), da2(hidden), dz(latent), dh1(hidden), da1(hidden);

    double loss = 0.0;
    const double denom = static_cast<double>(batch_count) * p;
    for (size_t s = 0; s < batch_count; ++s) {
        const double* x = batch.data() + s * p;
        affine(model.w1, model.b1, x, a1.data(), hidden, p);
        for (uint32_t i = 0; i < hidden; ++i) h1[i] = std::tanh(a1[i]);
        affine(model.w2, model.b2, h1.data(), z.data(), latent, hidden);
        std::fill(z.begin() + masked_from, z.end(), 0.0);  // zero-out mask
        affine(model.w3, model.b3, z.data(), a2.data(), hidden, latent);
        for (uint32_t i = 0; i < hidden; ++i) h2[i] = std::tanh(a2[i]);
        affine(model.w4, model.b4, h2.data(), y.data(), p, hidden);

        for (uint32_t i = 0; i < p; ++i) {
            const double diff = y[i] - x[i];
            loss += diff * diff;
            dy[i] = 2.0 * diff / denom;
        }
        if (!grads) continue;

        affine_backward(model.w4, h2.data(), dy.data(), &grads->w4, &grads->b4, dh2.data(), p,
                        hidden);
        for (uint32_t i = 0; i < hidden; ++i) da2[i] = dh2[i] * (1.0 - h2[i] * h2[i]);
        affine_backward(model.w3, z.data(), da2.data(), &grads->w3, &grads->b3, dz.data(), hidden,
                        latent);
        // Gradient through the mask is exactly zero at zeroed positions.
        std::fill(dz.begin() + masked_from, dz.end(), 0.0);
        affine_backward(model.w2, h1.data(), dz.data(), &grads->w2, &grads->b2, dh1.data(), latent,
                        hidden);
        for (uint32_t i = 0; i < hidden; ++i) da1[i] = dh1[i] * (1.0 - h1[i] * h1[i]);
        affine_backward(model.w1, x, da1.data(), &grads->w1, &grads->b1, nullptr, hidden, p);
    }
    return loss / denom;
}

double masked_mse(const TinyAutoencoder& model, std::span<const double> batch, size_t batch_count,
                  uint32_t t) {
    return loss_and_gradients(model, batch, batch_count, t, nullptr);
}

namespace {

void sgd_update(std::vector<double>* w, const std::vector<double>& g, double lr) {
    for (size_t i = 0; i < w->size(); ++i) (*w)[i] -= lr * g[i];
}

}  // namespace

double train_step(TinyAutoencoder& model, std::span<const double> batch, size_t batch_count,
                  const TrainConfig& cfg, Rng& rng) {
    const uint32_t t = sample_truncation(cfg.key_count, model.tokens, rng);  // per batch
    Gradients grads;
    const double loss = loss_and_gradients(model, batch, batch_count, t, &grads);
    if (!std::isfinite(loss)) {
        throw TrainingError("non-finite training loss at t=" + std::to_string(t));
    }
    sgd_update(&model.w1, grads.w1, cfg.learning_rate);
    sgd_update(&model.b1, grads.b1, cfg.learning_rate);
    sgd_update(&model.w2, grads.w2, cfg.learning_rate);
    sgd_update(&model.b2, grads.b2, cfg.learning_rate);
    sgd_update(&model.w3, grads.w3, cfg.learning_rate);
    sgd_update(&model.b3, grads.b3, cfg.learning_rate);
    sgd_update(&model.w4, grads.w4, cfg.learning_rate);
    sgd_update(&model.b4, grads.b4, cfg.learning_rate);
    return loss;
}

std::vector<std::pair<uint32_t, double>> evaluate_information_gradient(
    const TinyAutoencoder& model, std::span<const double> dataset, size_t sample_count,
    std::span<const uint32_t> t_values) {
    if (sample_count == 0) throw ArgumentError("empty dataset");
    std::vector<std::pair<uint32_t, double>> out;
    out.reserve(t_values.size());
    for (const uint32_t t : t_values) {
        out.emplace_back(t, masked_mse(model, dataset, sample_count, t));
    }
    return out;
}

std::vector<double> make_lowrank_patches(uint32_t p, size_t count, uint64_t seed) {
    const uint32_t side = static_cast<uint32_t>(std::lround(std::sqrt(double(p))));
    Rng rng(seed);

    // Fixed smooth basis: separable cosines ordered by total frequency. The
    // component count is chosen well above the smallest truncation budgets so
    // every additional latent slot can carry useful information.
    constexpr uint32_t kBasis = 32;
    const double pi = 3.14159265358979323846;
    std::vector<double> basis(static_cast<size_t>(kBasis) * p);
    std::vector<std::array<uint32_t, 2>> freq;
    for (uint32_t total = 1; freq.size() < kBasis; ++total) {
        for (uint32_t fy = 0; fy <= total && freq.size() < kBasis; ++fy) {
            freq.push_back({fy, total - fy});
        }
    }
    for (uint32_t k = 0; k < kBasis; ++k) {
        for (uint32_t y = 0; y < side; ++y) {
            for (uint32_t x = 0; x < side; ++x) {
                basis[static_cast<size_t>(k) * p + y * side + x] =
                    std::cos(pi * freq[k][0] * (y + 0.5) / side) *
                    std::cos(pi * freq[k][1] * (x + 0.5) / side);
            }
        }
    }

    std::vector<double> data(count * p);
    for (size_t s = 0; s < count; ++s) {
        double* patch = data.data() + s * p;
        std::fill(patch, patch + p, 0.5);  // mid-gray base
        for (uint32_t k = 0; k < kBasis; ++k) {
            const double coeff = (2.0 * rng.uniform() - 1.0) * 0.3 / std::sqrt(1.0 + k);
            for (uint32_t i = 0; i < p; ++i) patch[i] += coeff * basis[static_cast<size_t>(k) * p + i];
        }
        for (uint32_t i = 0; i < p; ++i) patch[i] += 0.01 * (2.0 * rng.uniform() - 1.0);
    }
    return data;
}

void save_patches(const std::string& path, std::span<const double> data, size_t count, uint32_t p) {
    if (data.size() != count * p) throw ArgumentError("patch blob shape mismatch");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f.write("RTPD", 4);
    const uint32_t header[2] = {static_cast<uint32_t>(count), p};
    f.write(reinterpret_cast<const char*>(header), sizeof(header));
    std::vector<float> tmp(data.begin(), data.end());
    f.write(reinterpret_cast<const char*>(tmp.data()),
            static_cast<std::streamsize>(tmp.size() * sizeof(float)));
    if (!f) throw IoError("write failed: " + path);
}

std::vector<double> load_patches(const std::string& path, size_t* count, uint32_t* p) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "RTPD", 4) != 0) throw IoError("bad patch blob magic: " + path);
    uint32_t header[2];
    f.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!f) throw IoError("truncated patch blob header: " + path);
    std::vector<float> tmp(static_cast<size_t>(header[0]) * header[1]);
    f.read(reinterpret_cast<char*>(tmp.data()),
           static_cast<std::streamsize>(tmp.size() * sizeof(float)));
    if (!f) throw IoError("truncated patch blob data: " + path);
    if (count) *count = header[0];
    if (p) *p = header[1];
    return std::vector<double>(tmp.begin(), tmp.end());
}

}  // namespace resitok
