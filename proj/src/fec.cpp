#include "resitok/fec.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "resitok/errors.hpp"

namespace resitok {

namespace {

constexpr double kNegInf = -1e30;

// LTE-style RSC constituent: feedback 13 octal (w = u ^ r2 ^ r3),
// feedforward 15 octal (parity = w ^ r1 ^ r3). State packs (r1 r2 r3).
struct Trellis {
    // next[state][w] and the parity emitted when the feedback-adder output
    // is w. The info bit on that branch is u = w ^ r2 ^ r3.
    uint8_t next[kTurboStates][2];
    uint8_t parity[kTurboStates][2];
    uint8_t info[kTurboStates][2];

    constexpr Trellis() : next{}, parity{}, info{} {
        for (uint32_t s = 0; s < kTurboStates; ++s) {
            const uint32_t r1 = (s >> 2) & 1, r2 = (s >> 1) & 1, r3 = s & 1;
            for (uint32_t w = 0; w < 2; ++w) {
                next[s][w] = static_cast<uint8_t>((w << 2) | (r1 << 1) | r2);
                parity[s][w] = static_cast<uint8_t>(w ^ r1 ^ r3);
                info[s][w] = static_cast<uint8_t>(w ^ r2 ^ r3);
            }
        }
    }
};

constexpr Trellis kTrellis;

uint64_t mod_mul(uint64_t a, uint64_t b, uint64_t m) { return (a % m) * (b % m) % m; }

}  // namespace

CodeRate parse_rate(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) throw ConfigError("bad code rate: " + text);
    CodeRate r;
    try {
        r.num = static_cast<uint32_t>(std::stoul(text.substr(0, slash)));
        r.den = static_cast<uint32_t>(std::stoul(text.substr(slash + 1)));
    } catch (const std::exception&) {
        throw ConfigError("bad code rate: " + text);
    }
    if (!rate_supported(r)) throw ConfigError("unsupported code rate: " + text);
    return r;
}

bool rate_supported(const CodeRate& r) {
    return (r.num == 1 && r.den == 3) || (r.num == 1 && r.den == 2) ||
           (r.num == 2 && r.den == 3) || (r.num == 3 && r.den == 4);
}

QppTable QppTable::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path);
    QppTable table;
    std::string line;
    size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ss(line);
        uint32_t len, f1, f2;
        if (!(ss >> len)) continue;  // blank/comment line
        if (!(ss >> f1 >> f2)) {
            throw IoError("bad QPP row at " + path + ":" + std::to_string(line_no));
        }
        table.insert(len, f1, f2);
    }
    if (table.entries_.empty()) throw ConfigError("empty QPP table: " + path);
    return table;
}

void QppTable::insert(uint32_t len, uint32_t f1, uint32_t f2) {
    qpp_interleave(len, f1, f2);  // validates bijectivity
    entries_[len] = {f1, f2};
}

std::pair<uint32_t, uint32_t> QppTable::params(uint32_t len) const {
    const auto it = entries_.find(len);
    if (it == entries_.end()) {
        throw ConfigError("unsupported turbo block length " + std::to_string(len));
    }
    return it->second;
}

uint32_t QppTable::next_length(uint32_t min_bits) const {
    const auto it = entries_.lower_bound(min_bits);
    if (it == entries_.end()) {
        throw ConfigError("no supported turbo block length >= " + std::to_string(min_bits));
    }
    return it->first;
}

uint32_t QppTable::max_length() const {
    if (entries_.empty()) throw ConfigError("empty QPP table");
    return entries_.rbegin()->first;
}

std::vector<uint32_t> qpp_interleave(uint32_t len, uint32_t f1, uint32_t f2) {
    if (len == 0) throw ConfigError("QPP length must be positive");
    std::vector<uint32_t> perm(len);
    std::vector<uint8_t> seen(len, 0);
    for (uint64_t i = 0; i < len; ++i) {
        const uint64_t v = (mod_mul(f1, i, len) + mod_mul(f2, mod_mul(i, i, len), len)) % len;
        perm[i] = static_cast<uint32_t>(v);
        if (seen[v]++) {
            throw ConfigError("QPP parameters (f1=" + std::to_string(f1) +
                              ", f2=" + std::to_string(f2) + ") are not bijective for len " +
                              std::to_string(len));
        }
    }
    return perm;
}

std::vector<uint8_t> rsc_encode(const std::vector<uint8_t>& info, std::vector<uint8_t>* tail) {
    std::vector<uint8_t> parity(info.size());
    uint32_t s = 0;
    for (size_t i = 0; i < info.size(); ++i) {
        const uint32_t r2 = (s >> 1) & 1, r3 = s & 1;
        const uint32_t w = (info[i] & 1u) ^ r2 ^ r3;
        parity[i] = kTrellis.parity[s][w];
        s = kTrellis.next[s][w];
    }
    if (tail) {
        for (int i = 0; i < 3; ++i) {
            // Feed u = r2 ^ r3 so the adder output is zero; drives state to 0.
            tail->push_back(kTrellis.info[s][0]);
            tail->push_back(kTrellis.parity[s][0]);
            s = kTrellis.next[s][0];
        }
    }
    return parity;
}

std::vector<uint8_t> turbo_encode(const std::vector<uint8_t>& info, const TurboConfig& cfg) {
    const uint32_t len = static_cast<uint32_t>(info.size());
    const auto [f1, f2] = cfg.qpp.params(len);  // throws for unsupported lengths
    const auto perm = qpp_interleave(len, f1, f2);

    std::vector<uint8_t> tail1, tail2;
    const auto parity1 = rsc_encode(info, &tail1);
    std::vector<uint8_t> interleaved(len);
    for (uint32_t i = 0; i < len; ++i) interleaved[i] = info[perm[i]];
    const auto parity2 = rsc_encode(interleaved, &tail2);

    std::vector<uint8_t> out;
    out.reserve(turbo_coded_length(len));
    out.insert(out.end(), info.begin(), info.end());
    out.insert(out.end(), parity1.begin(), parity1.end());
    out.insert(out.end(), parity2.begin(), parity2.end());
    out.insert(out.end(), tail1.begin(), tail1.end());
    out.insert(out.end(), tail2.begin(), tail2.end());
    return out;
}

LlrVector bcjr_decode(const LlrVector& input_llrs, const LlrVector& parity_llrs,
                      const LlrVector& tail, BcjrAlgo algo) {
    const size_t len = input_llrs.size();
    if (parity_llrs.size() != len || tail.size() != 6) {
        throw ArgumentError("bcjr_decode: length mismatch");
    }
    const size_t steps = len + 3;

    // max*(a,b) = log(e^a + e^b); the max-log mode drops the correction term.
    const bool exact = (algo == BcjrAlgo::kLogMap);
    const auto acc = [exact](double a, double b) {
        if (a <= kNegInf) return b;
        if (b <= kNegInf) return a;
        const double hi = std::max(a, b);
        return exact ? hi + std::log1p(std::exp(-std::abs(a - b))) : hi;
    };

    // Branch metric in the +-1 convention (positive LLR = bit 0):
    // gamma = 0.5 * (sign(u) * Lu + sign(p) * Lp).
    const auto bit_sign = [](uint8_t bit) { return bit ? -1.0 : 1.0; };

    std::vector<double> alpha((steps + 1) * kTurboStates, kNegInf);
    alpha[0] = 0.0;  // state 0
    for (size_t k = 0; k < steps; ++k) {
        const double lu = (k < len) ? input_llrs[k] : tail[2 * (k - len)];
        const double lp = (k < len) ? parity_llrs[k] : tail[2 * (k - len) + 1];
        double* a = alpha.data() + k * kTurboStates;
        double* an = alpha.data() + (k + 1) * kTurboStates;
        std::fill(an, an + kTurboStates, kNegInf);
        for (uint32_t s = 0; s < kTurboStates; ++s) {
            if (a[s] <= kNegInf) continue;
            const uint32_t w_lo = (k < len) ? 0 : 0;
            const uint32_t w_hi = (k < len) ? 2 : 1;  // tail: only w = 0 branches
            for (uint32_t w = w_lo; w < w_hi; ++w) {
                const double g = 0.5 * (bit_sign(kTrellis.info[s][w]) * lu +
                                        bit_sign(kTrellis.parity[s][w]) * lp);
                const uint32_t ns = kTrellis.next[s][w];
                an[ns] = acc(an[ns], a[s] + g);
            }
        }
    }

    std::vector<double> beta((steps + 1) * kTurboStates, kNegInf);
    beta[steps * kTurboStates + 0] = 0.0;  // terminated at state 0
    for (size_t k = steps; k-- > 0;) {
        const double lu = (k < len) ? input_llrs[k] : tail[2 * (k - len)];
        const double lp = (k < len) ? parity_llrs[k] : tail[2 * (k - len) + 1];
        double* b = beta.data() + k * kTurboStates;
        const double* bn = beta.data() + (k + 1) * kTurboStates;
        for (uint32_t s = 0; s < kTurboStates; ++s) {
            const uint32_t w_hi = (k < len) ? 2 : 1;
            double best = kNegInf;
            for (uint32_t w = 0; w < w_hi; ++w) {
                const uint32_t ns = kTrellis.next[s][w];
                if (bn[ns] <= kNegInf) continue;
                const double g = 0.5 * (bit_sign(kTrellis.info[s][w]) * lu +
                                        bit_sign(kTrellis.parity[s][w]) * lp);
                best = acc(best, bn[ns] + g);
            }
            b[s] = best;
        }
    }

    LlrVector app(len);
    for (size_t k = 0; k < len; ++k) {
        const double* a = alpha.data() + k * kTurboStates;
        const double* bn = beta.data() + (k + 1) * kTurboStates;
        double max0 = kNegInf, max1 = kNegInf;
        for (uint32_t s = 0; s < kTurboStates; ++s) {
            if (a[s] <= kNegInf) continue;
            for (uint32_t w = 0; w < 2; ++w) {
                const uint32_t ns = kTrellis.next[s][w];
                if (bn[ns] <= kNegInf) continue;
                const double g = 0.5 * (bit_sign(kTrellis.info[s][w]) * input_llrs[k] +
                                        bit_sign(kTrellis.parity[s][w]) * parity_llrs[k]);
                const double metric = a[s] + g + bn[ns];
                if (kTrellis.info[s][w] == 0) {
                    max0 = acc(max0, metric);
                } else {
                    max1 = acc(max1, metric);
                }
            }
        }
        app[k] = max0 - max1;  // positive = bit 0
    }
    return app;
}

std::vector<uint8_t> turbo_decode(const LlrVector& llrs, size_t info_len, const TurboConfig& cfg) {
    if (llrs.size() != turbo_coded_length(info_len)) {
        throw ArgumentError("turbo_decode: LLR length mismatch");
    }
    const uint32_t len = static_cast<uint32_t>(info_len);
    const auto [f1, f2] = cfg.qpp.params(len);
    const auto perm = qpp_interleave(len, f1, f2);

    // Clamp before decoding.
    LlrVector in(llrs);
    for (double& v : in) v = std::clamp(v, -kLlrClamp, kLlrClamp);

    const LlrVector sys(in.begin(), in.begin() + len);
    const LlrVector p1(in.begin() + len, in.begin() + 2 * len);
    const LlrVector p2(in.begin() + 2 * len, in.begin() + 3 * len);
    const LlrVector tail1(in.begin() + 3 * len, in.begin() + 3 * len + 6);
    const LlrVector tail2(in.begin() + 3 * len + 6, in.end());

    LlrVector sys_perm(len);
    for (uint32_t i = 0; i < len; ++i) sys_perm[i] = sys[perm[i]];

    const double scale = (cfg.algo == BcjrAlgo::kMaxLog) ? cfg.extrinsic_scale : 1.0;
    LlrVector apriori1(len, 0.0);
    LlrVector app2;
    for (int it = 0; it < cfg.iterations; ++it) {
        LlrVector input1(len);
        for (uint32_t i = 0; i < len; ++i) input1[i] = sys[i] + apriori1[i];
        const LlrVector app1 = bcjr_decode(input1, p1, tail1, cfg.algo);

        LlrVector apriori2(len);
        for (uint32_t i = 0; i < len; ++i) {
            const double ext = app1[perm[i]] - sys[perm[i]] - apriori1[perm[i]];
            apriori2[i] = scale * ext;
        }

        LlrVector input2(len);
        for (uint32_t i = 0; i < len; ++i) input2[i] = sys_perm[i] + apriori2[i];
        app2 = bcjr_decode(input2, p2, tail2, cfg.algo);

        for (uint32_t i = 0; i < len; ++i) {
            const double ext = app2[i] - sys_perm[i] - apriori2[i];
            apriori1[perm[i]] = scale * ext;
        }
    }

    std::vector<uint8_t> bits(len);
    for (uint32_t i = 0; i < len; ++i) {
        // app2 is in interleaved order; deinterleave via perm.
        bits[perm[i]] = app2[i] < 0.0 ? 1 : 0;
    }
    return bits;
}

size_t rate_matched_length(size_t info_len, const CodeRate& rate) {
    if (!rate_supported(rate)) throw ConfigError("unsupported code rate");
    if (rate.is_mother()) return turbo_coded_length(info_len);
    // ceil(info_len / r) = ceil(info_len * den / num)
    return (info_len * rate.den + rate.num - 1) / rate.num;
}

std::vector<size_t> rate_match_positions(size_t info_len, const CodeRate& rate) {
    if (!rate_supported(rate)) throw ConfigError("unsupported code rate");
    std::vector<size_t> pos;
    if (rate.is_mother()) {
        pos.resize(turbo_coded_length(info_len));
        for (size_t i = 0; i < pos.size(); ++i) pos[i] = i;
        return pos;
    }
    const size_t keep_parity = rate_matched_length(info_len, rate) - info_len;
    pos.reserve(info_len + keep_parity);
    for (size_t i = 0; i < info_len; ++i) pos.push_back(i);  // systematic, never punctured
    // Split the kept parity budget across the two streams so each constituent
    // decoder keeps an evenly spaced share; tail bits are punctured.
    const size_t keep[2] = {(keep_parity + 1) / 2, keep_parity / 2};
    for (size_t j = 0; j < 2 * info_len; ++j) {
        const size_t stream = j % 2;  // 0 -> parity1, 1 -> parity2
        const size_t index = j / 2;
        // Even spacing within the stream: keep when the scaled counter advances.
        if ((index + 1) * keep[stream] / info_len > index * keep[stream] / info_len) {
            pos.push_back(info_len * (1 + stream) + index);
        }
    }
    return pos;
}

std::vector<uint8_t> rate_match(const std::vector<uint8_t>& coded, size_t info_len,
                                const CodeRate& rate) {
    if (coded.size() != turbo_coded_length(info_len)) {
        throw ArgumentError("rate_match: mother codeword length mismatch");
    }
    const auto pos = rate_match_positions(info_len, rate);
    std::vector<uint8_t> out(pos.size());
    for (size_t i = 0; i < pos.size(); ++i) out[i] = coded[pos[i]];
    return out;
}

LlrVector rate_recover(const LlrVector& llrs, const CodeRate& rate, size_t info_len) {
    const auto pos = rate_match_positions(info_len, rate);
    if (llrs.size() != pos.size()) {
        throw FramingError("rate_recover: LLR count does not match punctured length");
    }
    LlrVector mother(turbo_coded_length(info_len), 0.0);  // erasures
    for (size_t i = 0; i < pos.size(); ++i) mother[pos[i]] = llrs[i];
    return mother;
}

}  // namespace resitok
