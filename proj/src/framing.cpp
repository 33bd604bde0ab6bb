#include "resitok/framing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "resitok/errors.hpp"

namespace resitok {

void FrameConfig::validate() const {
    if (b_token == 0 || b_token > 31) throw ConfigError("b_token out of range");
    if (key_count == 0 || key_count >= total_tokens) throw ConfigError("key_count out of range");
    if (!(target_cbr > 0.0)) throw ConfigError("target_cbr must be positive");
    if (image_height == 0 || image_width == 0) throw ConfigError("image dimensions must be positive");
}

uint64_t FrameConfig::symbol_budget() const {
    return static_cast<uint64_t>(
        std::llround(target_cbr * static_cast<double>(image_height) * image_width * 3.0));
}

void Bitstream::dump(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("write failed: " + path);
    std::ofstream sidecar(path + ".bits");
    sidecar << "bits=" << bit_length << "\n";
}

DetailBudget compute_detail_budget(const FrameConfig& cfg, const CodeRate& r, uint32_t m) {
    cfg.validate();
    if (!rate_supported(r)) throw ConfigError("unsupported code rate");
    if (m != 1 && m != 2 && m != 4 && m != 6) throw ConfigError("unsupported modulation order");

    const uint64_t n_s = cfg.symbol_budget();
    uint64_t info_bits;
    if (cfg.formula == BudgetFormula::kCorrected) {
        // info bits = symbols * bits/symbol * rate
        info_bits = n_s * m * r.num / r.den;
    } else {
        // as printed: r in the numerator, m in the denominator
        info_bits = n_s * r.num / (r.den * static_cast<uint64_t>(m));
    }
    const uint64_t tokens = info_bits / cfg.b_token;
    DetailBudget budget;
    if (tokens < cfg.key_count) {
        budget.feasible = false;  // never silently truncate key tokens
        budget.n_t = 0;
        return budget;
    }
    budget.feasible = true;
    budget.n_t = static_cast<uint32_t>(tokens - cfg.key_count);
    return budget;
}

std::vector<uint32_t> select_tokens(const TokenSequence& seq, uint32_t n_t) {
    if (n_t > seq.total() - seq.key_count) {
        throw ArgumentError("select_tokens: n_t exceeds available detail tokens");
    }
    const size_t count = seq.key_count + n_t;
    return std::vector<uint32_t>(seq.indices.begin(), seq.indices.begin() + count);
}

Bitstream pack_tokens(std::span<const uint32_t> tokens, uint32_t b_token) {
    const uint32_t limit = 1u << b_token;
    Bitstream bs;
    bs.bit_length = tokens.size() * b_token;
    bs.bytes.assign((bs.bit_length + 7) / 8, 0);
    size_t bit = 0;
    for (const uint32_t tok : tokens) {
        if (tok >= limit) throw ArgumentError("pack_tokens: token exceeds b_token bits");
        for (uint32_t j = 0; j < b_token; ++j, ++bit) {
            if ((tok >> (b_token - 1 - j)) & 1u) bs.bytes[bit / 8] |= 1u << (7 - bit % 8);
        }
    }
    return bs;
}

std::vector<uint32_t> unpack_tokens(const Bitstream& bs, uint32_t b_token, size_t count) {
    if (bs.bit_length < count * b_token) {
        throw FramingError("unpack_tokens: insufficient bits");
    }
    std::vector<uint32_t> tokens(count);
    size_t bit = 0;
    for (size_t i = 0; i < count; ++i) {
        uint32_t v = 0;
        for (uint32_t j = 0; j < b_token; ++j, ++bit) v = (v << 1) | bs.bit(bit);
        tokens[i] = v;
    }
    return tokens;
}

TransmitPlan plan_transmission(const FrameConfig& cfg, const CodeRate& r, uint32_t m,
                               const QppTable& qpp) {
    const DetailBudget budget = compute_detail_budget(cfg, r, m);
    TransmitPlan plan;
    if (!budget.feasible) return plan;

    const uint64_t n_s = cfg.symbol_budget();
    const uint32_t nominal =
        std::min(cfg.key_count + budget.n_t, cfg.total_tokens);
    // Walk down from the nominal budget until the coded block (including the
    // FEC block-length grid padding) fits in the symbol budget.
    for (uint32_t tokens = nominal; tokens >= cfg.key_count; --tokens) {
        const uint32_t info = tokens * cfg.b_token;
        if (info > qpp.max_length()) continue;
        const uint32_t block = qpp.next_length(info);
        const size_t coded = rate_matched_length(block, r);
        const uint64_t symbols = (coded + m - 1) / m;
        if (symbols <= n_s) {
            plan.feasible = true;
            plan.tokens = tokens;
            plan.info_bits = info;
            plan.block_len = block;
            plan.coded_bits = static_cast<uint32_t>(coded);
            plan.symbols = static_cast<uint32_t>(symbols);
            return plan;
        }
        if (tokens == cfg.key_count) break;
    }
    return plan;  // infeasible: even key tokens do not fit after FEC overhead
}

}  // namespace resitok
