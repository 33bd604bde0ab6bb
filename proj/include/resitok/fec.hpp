#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "resitok/modem.hpp"  // LlrVector

namespace resitok {

// Code rate as an exact rational. Supported: 1/3 (mother), 1/2, 2/3, 3/4.
struct CodeRate {
    uint32_t num = 1;
    uint32_t den = 3;

    double value() const { return static_cast<double>(num) / den; }
    bool is_mother() const { return num * 3 == den; }
    bool operator==(const CodeRate&) const = default;
};

CodeRate parse_rate(const std::string& text);  // "1/3", "1/2", ...
bool rate_supported(const CodeRate& r);

// Supported interleaver block lengths. Plain-text fixture, columns:
// len f1 f2, '#' comments.
class QppTable {
public:
    static QppTable load(const std::string& path);

    bool supports(uint32_t len) const { return entries_.count(len) != 0; }
    std::pair<uint32_t, uint32_t> params(uint32_t len) const;
    // Smallest supported length >= min_bits; throws ConfigError if none.
    uint32_t next_length(uint32_t min_bits) const;
    uint32_t max_length() const;
    const std::map<uint32_t, std::pair<uint32_t, uint32_t>>& entries() const { return entries_; }

    void insert(uint32_t len, uint32_t f1, uint32_t f2);

private:
    std::map<uint32_t, std::pair<uint32_t, uint32_t>> entries_;
};

// pi(i) = (f1*i + f2*i^2) mod len; verified bijective (ConfigError if not).
std::vector<uint32_t> qpp_interleave(uint32_t len, uint32_t f1, uint32_t f2);

// BCJR flavor: exact log-MAP (max* recursions) or max-log approximation.
enum class BcjrAlgo { kLogMap, kMaxLog };

// Rate-1/3 parallel-concatenated turbo code, RSC generators 13/15 octal
// (feedback/feedforward), constraint length 4, trellis-terminated.
struct TurboConfig {
    QppTable qpp;
    int iterations = 6;
    BcjrAlgo algo = BcjrAlgo::kLogMap;
    double extrinsic_scale = 0.75;  // applied in max-log mode only
};

inline constexpr uint32_t kTurboStates = 8;
inline constexpr uint32_t kTurboTailBits = 12;  // 2 constituents x 3 steps x (sys,par)

// Mother-code length for info length L.
inline size_t turbo_coded_length(size_t info_len) { return 3 * info_len + kTurboTailBits; }

// Single terminated RSC constituent; exposed for oracle tests.
// Returns parity bits (length L) and appends the 3 (sys,par) tail pairs to
// tail (6 bits: x0 z0 x1 z1 x2 z2).
std::vector<uint8_t> rsc_encode(const std::vector<uint8_t>& info, std::vector<uint8_t>* tail);

// Output layout: sys(L) | parity1(L) | parity2(L) | tail1(6) | tail2(6).
std::vector<uint8_t> turbo_encode(const std::vector<uint8_t>& info, const TurboConfig& cfg);

// BCJR a-posteriori LLRs for one terminated constituent.
// input_llrs = systematic-plus-a-priori LLRs (length L), parity_llrs
// (length L), tail = 6 LLRs (sys,par pairs for the 3 termination steps).
// Positive LLR means bit 0. Defaults to the max-log recursion, whose hard
// decisions coincide with maximum-likelihood Viterbi decoding.
LlrVector bcjr_decode(const LlrVector& input_llrs, const LlrVector& parity_llrs,
                      const LlrVector& tail, BcjrAlgo algo = BcjrAlgo::kMaxLog);

// Iterative turbo decoding; always returns a hard decision.
std::vector<uint8_t> turbo_decode(const LlrVector& llrs, size_t info_len, const TurboConfig& cfg);

// Deterministic periodic puncturing to the target rate. Systematic bits are
// never punctured; for r > 1/3 the parity streams are thinned evenly and the
// tail bits are punctured, so the output length is exactly
// ceil(info_len / r). r = 1/3 is the identity.
size_t rate_matched_length(size_t info_len, const CodeRate& rate);
std::vector<uint8_t> rate_match(const std::vector<uint8_t>& coded, size_t info_len,
                                const CodeRate& rate);

// Positions (into the mother codeword) kept by rate_match, in output order.
std::vector<size_t> rate_match_positions(size_t info_len, const CodeRate& rate);

// Inverse of rate_match on LLRs: punctured positions become erasures (LLR 0).
LlrVector rate_recover(const LlrVector& llrs, const CodeRate& rate, size_t info_len);

}  // namespace resitok
