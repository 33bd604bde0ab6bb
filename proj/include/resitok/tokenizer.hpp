#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace resitok {

// K x d table of real-valued codewords for vector quantization.
// Immutable after construction; safe to share read-only across threads.
class Codebook {
public:
    Codebook(std::vector<float> codewords, uint32_t k, uint32_t d);

    uint32_t size() const { return k_; }
    uint32_t dim() const { return d_; }

    std::span<const float> codeword(uint32_t index) const;

    // Little-endian binary file: magic "RTCB", u32 K, u32 d, K*d float32 row-major.
    void save(const std::string& path) const;
    static Codebook load(const std::string& path);

private:
    std::vector<float> codewords_;  // row-major K x d
    uint32_t k_ = 0;
    uint32_t d_ = 0;
};

// Importance-ordered token indices with a key/detail split and a
// received-mask. Positions with mask false were never transmitted and
// decode as the all-zeros latent vector.
struct TokenSequence {
    std::vector<uint32_t> indices;
    std::vector<uint8_t> received_mask;  // 1 = token present
    uint32_t key_count = 0;

    uint32_t total() const { return static_cast<uint32_t>(indices.size()); }
};

// k-means codebook training with k-means++ initialization. Deterministic
// for a fixed seed. Iteration cap 100, convergence tolerance 1e-6 on
// centroid movement. If objective_history is non-null it receives the
// per-iteration sum of squared distances (non-increasing).
Codebook train_codebook(std::span<const double> samples, size_t sample_count, uint32_t d,
                        uint32_t k, uint64_t seed, int max_iterations = 100,
                        double tolerance = 1e-6, std::vector<double>* objective_history = nullptr);

// Nearest codeword by squared Euclidean distance; ties break to the
// lowest index.
uint32_t quantize(std::span<const double> v, const Codebook& cb);

// Codeword lookup (exact).
std::vector<double> dequantize(uint32_t token, const Codebook& cb);

// Receiver-side reconstruction of the full-length token set: the received
// prefix keeps its tokens (mask true), the missing suffix is filled with
// token 0 and mask false. Throws ProtocolError if the prefix is shorter
// than key_count.
TokenSequence zero_pad(std::span<const uint32_t> received, uint32_t key_count, uint32_t total);

}  // namespace resitok
