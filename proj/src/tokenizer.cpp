#include "resitok/tokenizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "resitok/errors.hpp"
#include "resitok/rng.hpp"

namespace resitok {

namespace {

double sq_dist(const double* a, const double* b, uint32_t d) {
    double acc = 0.0;
    for (uint32_t i = 0; i < d; ++i) {
        const double diff = a[i] - b[i];
        acc += diff * diff;
    }
    return acc;
}

double sq_dist_f(const double* a, const float* b, uint32_t d) {
    double acc = 0.0;
    for (uint32_t i = 0; i < d; ++i) {
        const double diff = a[i] - static_cast<double>(b[i]);
        acc += diff * diff;
    }
    return acc;
}

}  // namespace

Codebook::Codebook(std::vector<float> codewords, uint32_t k, uint32_t d)
    : codewords_(std::move(codewords)), k_(k), d_(d) {
    if (k_ == 0 || d_ == 0 || codewords_.size() != static_cast<size_t>(k_) * d_) {
        throw ConfigError("codebook shape mismatch");
    }
}

std::span<const float> Codebook::codeword(uint32_t index) const {
    if (index >= k_) throw ArgumentError("codeword index out of range");
    return {codewords_.data() + static_cast<size_t>(index) * d_, d_};
}

void Codebook::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f.write("RTCB", 4);
    const uint32_t header[2] = {k_, d_};
    f.write(reinterpret_cast<const char*>(header), sizeof(header));
    f.write(reinterpret_cast<const char*>(codewords_.data()),
            static_cast<std::streamsize>(codewords_.size() * sizeof(float)));
    if (!f) throw IoError("write failed: " + path);
}

Codebook Codebook::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "RTCB", 4) != 0) throw IoError("bad codebook magic: " + path);
    uint32_t header[2];
    f.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!f) throw IoError("truncated codebook header: " + path);
    std::vector<float> data(static_cast<size_t>(header[0]) * header[1]);
    f.read(reinterpret_cast<char*>(data.data()),
           static_cast<std::streamsize>(data.size() * sizeof(float)));
    if (!f) throw IoError("truncated codebook data: " + path);
    return Codebook(std::move(data), header[0], header[1]);
}

Codebook train_codebook(std::span<const double> samples, size_t sample_count, uint32_t d,
                        uint32_t k, uint64_t seed, int max_iterations, double tolerance,
                        std::vector<double>* objective_history) {
    if (sample_count == 0) throw ConfigError("empty sample set");
    if (sample_count < k) throw ConfigError("fewer samples than codebook size");
    if (samples.size() != sample_count * d) throw ConfigError("sample buffer shape mismatch");

    Rng rng(seed);
    const auto sample = [&](size_t i) { return samples.data() + i * d; };

    // k-means++ seeding.
    std::vector<double> centroids(static_cast<size_t>(k) * d);
    std::vector<double> min_dist(sample_count, std::numeric_limits<double>::infinity());
    {
        const size_t first = rng.uniform_int(sample_count);
        std::copy_n(sample(first), d, centroids.begin());
    }
    for (uint32_t c = 1; c < k; ++c) {
        const double* prev = centroids.data() + static_cast<size_t>(c - 1) * d;
        double total = 0.0;
        for (size_t i = 0; i < sample_count; ++i) {
            min_dist[i] = std::min(min_dist[i], sq_dist(sample(i), prev, d));
            total += min_dist[i];
        }
        size_t pick;
        if (total <= 0.0) {
            // All remaining points coincide with chosen centers.
            throw ConfigError("fewer than K distinct samples");
        } else {
            double target = rng.uniform() * total;
            pick = sample_count - 1;
            for (size_t i = 0; i < sample_count; ++i) {
                target -= min_dist[i];
                if (target <= 0.0) {
                    pick = i;
                    break;
                }
            }
            // Never re-pick an existing center (distance 0 carries no weight,
            // but guard against float edge cases).
            while (min_dist[pick] == 0.0 && pick + 1 < sample_count) ++pick;
        }
        std::copy_n(sample(pick), d, centroids.begin() + static_cast<size_t>(c) * d);
    }

    std::vector<uint32_t> assign(sample_count, 0);
    std::vector<double> sums(static_cast<size_t>(k) * d);
    std::vector<size_t> counts(k);
    double prev_objective = std::numeric_limits<double>::infinity();
    bool reseeded = false;

    for (int iter = 0; iter < max_iterations; ++iter) {
        double objective = 0.0;
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (size_t i = 0; i < sample_count; ++i) {
            double best = std::numeric_limits<double>::infinity();
            uint32_t best_c = 0;
            for (uint32_t c = 0; c < k; ++c) {
                const double dist = sq_dist(sample(i), centroids.data() + static_cast<size_t>(c) * d, d);
                if (dist < best) {
                    best = dist;
                    best_c = c;
                }
            }
            assign[i] = best_c;
            objective += best;
            counts[best_c]++;
            double* s = sums.data() + static_cast<size_t>(best_c) * d;
            const double* x = sample(i);
            for (uint32_t j = 0; j < d; ++j) s[j] += x[j];
        }
        if (objective_history) objective_history->push_back(objective);
        if (!reseeded && objective > prev_objective + 1e-12) {
            throw ConfigError("k-means objective increased");  // should be unreachable
        }
        prev_objective = objective;

        reseeded = false;
        double movement = 0.0;
        for (uint32_t c = 0; c < k; ++c) {
            double* ctr = centroids.data() + static_cast<size_t>(c) * d;
            if (counts[c] == 0) {
                // Re-seed an empty cluster to the point farthest from its centroid.
                size_t far_i = 0;
                double far_d = -1.0;
                for (size_t i = 0; i < sample_count; ++i) {
                    const double dist =
                        sq_dist(sample(i), centroids.data() + static_cast<size_t>(assign[i]) * d, d);
                    if (dist > far_d) {
                        far_d = dist;
                        far_i = i;
                    }
                }
                std::copy_n(sample(far_i), d, ctr);
                movement += far_d;
                reseeded = true;
                continue;
            }
            const double* s = sums.data() + static_cast<size_t>(c) * d;
            for (uint32_t j = 0; j < d; ++j) {
                const double updated = s[j] / static_cast<double>(counts[c]);
                const double diff = updated - ctr[j];
                movement += diff * diff;
                ctr[j] = updated;
            }
        }
        if (movement < tolerance * tolerance) break;
    }

    std::vector<float> out(centroids.size());
    for (size_t i = 0; i < centroids.size(); ++i) out[i] = static_cast<float>(centroids[i]);

    // Codewords must be pairwise distinct (1e-9 tolerance).
    for (uint32_t a = 0; a < k; ++a) {
        for (uint32_t b = a + 1; b < k; ++b) {
            double dist = 0.0;
            for (uint32_t j = 0; j < d; ++j) {
                const double diff = static_cast<double>(out[static_cast<size_t>(a) * d + j]) -
                                    static_cast<double>(out[static_cast<size_t>(b) * d + j]);
                dist += diff * diff;
            }
            if (dist <= 1e-18) {
                throw ConfigError("duplicate codewords after training");
            }
        }
    }
    return Codebook(std::move(out), k, d);
}

uint32_t quantize(std::span<const double> v, const Codebook& cb) {
    if (v.size() != cb.dim()) throw ArgumentError("quantize: dimension mismatch");
    double best = std::numeric_limits<double>::infinity();
    uint32_t best_idx = 0;
    for (uint32_t c = 0; c < cb.size(); ++c) {
        const double dist = sq_dist_f(v.data(), cb.codeword(c).data(), cb.dim());
        if (dist < best) {  // strict: ties keep the lowest index
            best = dist;
            best_idx = c;
        }
    }
    return best_idx;
}

std::vector<double> dequantize(uint32_t token, const Codebook& cb) {
    if (token >= cb.size()) throw ArgumentError("dequantize: token index out of range");
    const auto cw = cb.codeword(token);
    return std::vector<double>(cw.begin(), cw.end());
}

TokenSequence zero_pad(std::span<const uint32_t> received, uint32_t key_count, uint32_t total) {
    if (received.size() < key_count) {
        throw ProtocolError("received fewer tokens than key_count");
    }
    if (received.size() > total) throw ArgumentError("received more tokens than total");
    TokenSequence seq;
    seq.key_count = key_count;
    seq.indices.assign(received.begin(), received.end());
    seq.indices.resize(total, 0);
    seq.received_mask.assign(total, 0);
    std::fill_n(seq.received_mask.begin(), received.size(), uint8_t{1});
    return seq;
}

}  // namespace resitok
