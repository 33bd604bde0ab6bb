#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "resitok/rng.hpp"

namespace resitok {

using cplx = std::complex<double>;

// Gray-mapped constellation with unit average energy. Supported orders:
// m = 1 (BPSK), 2 (QPSK), 4 (16-QAM), 6 (64-QAM). points[label] is the
// symbol for the m-bit label read MSB-first (first m/2 bits -> I axis).
struct ConstellationSpec {
    uint32_t bits_per_symbol = 0;
    std::vector<cplx> points;

    static ConstellationSpec make(uint32_t m);

    // Plain-text fixture: one "label I Q" line per point, 17 significant
    // digits. Used to pin the shipped tables bit-exactly.
    void save_table(const std::string& path) const;
    static ConstellationSpec load_table(const std::string& path);
};

struct ChannelParams {
    double snr_db = 0.0;    // Es/N0 in dB; +infinity means noiseless
    cplx h = {1.0, 0.0};    // complex channel gain, known at the receiver
    uint64_t seed = 0;

    bool noiseless() const;
    // Total complex noise variance sigma^2 = 10^(-snr_db/10).
    double noise_variance() const;
};

// Per-bit log-likelihood ratios; positive means bit 0 more likely.
using LlrVector = std::vector<double>;

inline constexpr double kLlrClamp = 30.0;

// MSB-first m-bit groups -> constellation points. Bit count must be a
// multiple of m (framing pads out of band).
std::vector<cplx> modulate(const std::vector<uint8_t>& bits, const ConstellationSpec& spec);

// r_i = h * s_i + n_i with circularly symmetric complex Gaussian noise of
// total variance sigma^2. Deterministic per seed.
std::vector<cplx> awgn_channel(const std::vector<cplx>& symbols, const ChannelParams& params);

// Max-log LLRs: (min_{x: bit=1} |r - h x|^2 - min_{x: bit=0} |r - h x|^2) / sigma^2,
// clamped to +-kLlrClamp. Perfect CSI (h, sigma^2 known).
LlrVector demodulate_soft(const std::vector<cplx>& received, const ConstellationSpec& spec,
                          const ChannelParams& params);

// Minimum-distance hard demapping, MSB-first bits.
std::vector<uint8_t> demodulate_hard(const std::vector<cplx>& received,
                                     const ConstellationSpec& spec, const cplx& h);

}  // namespace resitok
