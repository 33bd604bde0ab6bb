// Independent reference implementations used only by tests: a hand-rolled
// RSC trellis (generators 13/15 octal) and a Viterbi decoder over LLR
// correlation metrics. Kept separate from the library so the tests cross
// check two implementations rather than one against itself.
#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracles {

// One step of the rate-1/2 RSC constituent, feedback 13 / feedforward 15
// (octal), constraint length 4. State bits are (s1, s2, s3), newest first.
inline uint32_t rsc_step(uint32_t state, uint32_t info, uint32_t* parity, uint32_t* w_out) {
    const uint32_t s1 = (state >> 2) & 1, s2 = (state >> 1) & 1, s3 = state & 1;
    const uint32_t w = info ^ s2 ^ s3;       // feedback 1 + D^2 + D^3
    *parity = w ^ s1 ^ s3;                   // feedforward 1 + D + D^3
    *w_out = w;
    return ((w << 2) | (s1 << 1) | s2) & 7;
}

// Termination input that drives the register toward zero (w = 0).
inline uint32_t rsc_termination_bit(uint32_t state) {
    const uint32_t s2 = (state >> 1) & 1, s3 = state & 1;
    return s2 ^ s3;
}

struct RscCodeword {
    std::vector<uint8_t> parity;          // length L
    std::array<uint8_t, 6> tail{};        // x0 z0 x1 z1 x2 z2
};

inline RscCodeword rsc_encode_ref(const std::vector<uint8_t>& info) {
    RscCodeword out;
    out.parity.resize(info.size());
    uint32_t state = 0;
    for (size_t i = 0; i < info.size(); ++i) {
        uint32_t p = 0, w = 0;
        state = rsc_step(state, info[i], &p, &w);
        out.parity[i] = static_cast<uint8_t>(p);
    }
    for (int i = 0; i < 3; ++i) {
        const uint32_t x = rsc_termination_bit(state);
        uint32_t p = 0, w = 0;
        state = rsc_step(state, x, &p, &w);
        out.tail[2 * i] = static_cast<uint8_t>(x);
        out.tail[2 * i + 1] = static_cast<uint8_t>(p);
    }
    return out;
}

// ML sequence decoding of one terminated RSC block from systematic and
// parity LLRs (positive LLR = bit 0). Metric: correlation (1-2b) * L / 2,
// maximized. Tail LLRs cover the 3 termination steps.
inline std::vector<uint8_t> viterbi_decode_ref(const std::vector<double>& sys_llrs,
                                               const std::vector<double>& parity_llrs,
                                               const std::vector<double>& tail_llrs) {
    const size_t len = sys_llrs.size();
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    std::vector<double> metric(8, kNegInf);
    metric[0] = 0.0;
    // survivor[step][state] = (prev_state, info_bit)
    std::vector<std::array<std::pair<int, uint8_t>, 8>> survivor(len + 3);

    auto expand = [&](size_t step, double llr_sys, double llr_par, bool forced_termination) {
        std::vector<double> next(8, kNegInf);
        for (uint32_t s = 0; s < 8; ++s) {
            if (metric[s] == kNegInf) continue;
            for (uint32_t u = 0; u < 2; ++u) {
                if (forced_termination && u != rsc_termination_bit(s)) continue;
                uint32_t p = 0, w = 0;
                const uint32_t ns = rsc_step(s, u, &p, &w);
                const double m = metric[s] + (u ? -0.5 : 0.5) * llr_sys +
                                 (p ? -0.5 : 0.5) * llr_par;
                if (m > next[ns]) {
                    next[ns] = m;
                    survivor[step][ns] = {static_cast<int>(s), static_cast<uint8_t>(u)};
                }
            }
        }
        metric = next;
    };

    for (size_t i = 0; i < len; ++i) expand(i, sys_llrs[i], parity_llrs[i], false);
    for (int i = 0; i < 3; ++i) expand(len + i, tail_llrs[2 * i], tail_llrs[2 * i + 1], true);

    // Terminated trellis ends in state 0.
    std::vector<uint8_t> bits(len);
    int state = 0;
    for (size_t step = len + 3; step-- > 0;) {
        const auto [prev, u] = survivor[step][state];
        if (step < len) bits[step] = u;
        state = prev;
    }
    return bits;
}

}  // namespace oracles
