#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "resitok/fec.hpp"
#include "resitok/tokenizer.hpp"

namespace resitok {

enum class BudgetFormula {
    kCorrected,  // n_t = floor(N_s * m * r / b_token) - |y_K|
    kPrinted,    // n_t = floor(N_s * r / (b_token * m)) - |y_K| (dimensionally odd; kept for comparison)
};

struct FrameConfig {
    uint32_t b_token = 12;      // bits per token = ceil(log2 K)
    uint32_t key_count = 32;    // |y_K|
    uint32_t total_tokens = 256;
    double target_cbr = 1.0 / 256.0;
    uint32_t image_height = 256;
    uint32_t image_width = 256;
    BudgetFormula formula = BudgetFormula::kCorrected;

    void validate() const;
    // Symbol budget N_s = round(target_cbr * H * W * 3).
    uint64_t symbol_budget() const;
};

// Packed bit vector with exact length; trailing pad bits are zero.
struct Bitstream {
    std::vector<uint8_t> bytes;
    size_t bit_length = 0;

    uint8_t bit(size_t i) const { return (bytes[i / 8] >> (7 - i % 8)) & 1u; }

    // Debug dump: raw bytes plus a sidecar text line "bits=<n>".
    void dump(const std::string& path) const;
};

struct DetailBudget {
    uint32_t n_t = 0;        // detail tokens that fit
    bool feasible = false;   // false when even key tokens do not fit
};

// Channel-budgeted detail-token count for code rate r and m bits/symbol.
DetailBudget compute_detail_budget(const FrameConfig& cfg, const CodeRate& r, uint32_t m);

// First key_count + n_t tokens in sequence order.
std::vector<uint32_t> select_tokens(const TokenSequence& seq, uint32_t n_t);

// Each token written as b_token bits, MSB first.
Bitstream pack_tokens(std::span<const uint32_t> tokens, uint32_t b_token);
std::vector<uint32_t> unpack_tokens(const Bitstream& bs, uint32_t b_token, size_t count);

// Full transport plan: the detail budget adjusted for the FEC block-length
// grid and termination/padding overhead so the modulated symbol count never
// exceeds the budget. Zero fill between info bits and the FEC block length
// is stripped by the receiver out of band.
struct TransmitPlan {
    bool feasible = false;
    uint32_t tokens = 0;      // key + detail tokens actually sent
    uint32_t info_bits = 0;   // tokens * b_token
    uint32_t block_len = 0;   // FEC block length (>= info_bits)
    uint32_t coded_bits = 0;  // rate-matched length
    uint32_t symbols = 0;     // ceil(coded_bits / m)
};

TransmitPlan plan_transmission(const FrameConfig& cfg, const CodeRate& r, uint32_t m,
                               const QppTable& qpp);

}  // namespace resitok
