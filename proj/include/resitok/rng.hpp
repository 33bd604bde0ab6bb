#pragma once

#include <cmath>
#include <cstdint>

namespace resitok {

// Deterministic RNG with an explicit, platform-independent bit stream.
// splitmix64 core; uniform doubles and Box-Muller gaussians are built on
// top of it directly so results do not depend on libstdc++ distribution
// internals.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    uint64_t uniform_int(uint64_t n) {
        // Rejection to avoid modulo bias.
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    // Standard normal via Box-Muller (no cached spare; two uniforms per draw).
    double gaussian() {
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Derives an independent stream for (purpose, index), e.g. per sweep
    // point and trial, without correlations between adjacent seeds.
    static uint64_t derive_seed(uint64_t base, uint64_t purpose, uint64_t index) {
        Rng mix(base ^ (purpose * 0x9e3779b97f4a7c15ULL) ^ (index * 0xc2b2ae3d27d4eb4fULL));
        mix.next_u64();
        return mix.next_u64();
    }

private:
    uint64_t state_;
};

}  // namespace resitok
