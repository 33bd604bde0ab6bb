// Acceptance harness: runs the eight release criteria end to end and prints
// exactly one PASS/FAIL line per criterion. Exits nonzero if any fail.
//
// Run from the repository root (fixtures are loaded via relative paths):
//   ./build/tests/acceptance
#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "resitok/amc.hpp"
#include "resitok/dct.hpp"
#include "resitok/fec.hpp"
#include "resitok/framing.hpp"
#include "resitok/image.hpp"
#include "resitok/modem.hpp"
#include "resitok/pipeline.hpp"
#include "resitok/rng.hpp"
#include "resitok/tokenizer.hpp"
#include "resitok/zeroout.hpp"

using namespace resitok;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

const std::vector<std::string> kCorpus = {
    "data/images/synth01.ppm",
    "data/images/synth02.ppm",
    "data/images/synth03.ppm",
    "data/images/synth04.ppm",
};

PipelineConfig base_config() {
    PipelineConfig cfg;
    cfg.turbo.qpp = QppTable::load("data/qpp_table.txt");
    return cfg;
}

std::vector<std::string> split_csv(const std::string& row) {
    std::vector<std::string> fields;
    std::stringstream ss(row);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    return fields;
}

std::vector<uint8_t> random_bits(size_t n, uint64_t seed) {
    Rng rng(seed);
    std::vector<uint8_t> bits(n);
    for (auto& b : bits) b = static_cast<uint8_t>(rng.next_u64() & 1);
    return bits;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// ---------------------------------------------------------------------------
// 1. Clean-channel identity: noiseless end-to-end run equals the tokenizer
//    round trip bit-exactly, post-FEC BER = 0, < 5 s per 256x256 image.
Outcome criterion_1() {
    const Codebook cb = Codebook::load("data/codebook_k4096_d4.rtcb");
    PipelineConfig cfg = base_config();
    cfg.snr_db = std::numeric_limits<double>::infinity();
    cfg.frame.target_cbr = 1.0 / 64.0;  // room for the full 256-token budget

    const ImageBuffer img = load_image(kCorpus[0]);
    const auto start = Clock::now();
    const auto [recon, report] = transmit(img, cfg, cb, 7);
    const double elapsed = seconds_since(start);

    const TokenSequence seq = encode_image(img, cfg.tokenizer, cb);
    const ImageBuffer direct = decode_image(seq, cfg.tokenizer, cb);

    const bool identical = recon.data == direct.data;
    const bool clean = report.post_fec_ber == 0.0 && report.token_errors == 0;
    std::ostringstream d;
    d << "bit-exact=" << (identical ? "yes" : "no") << " post_fec_ber=" << report.post_fec_ber
      << " elapsed=" << elapsed << "s";
    return {identical && clean && elapsed < 5.0, d.str()};
}

// ---------------------------------------------------------------------------
// 2. Budget arithmetic: CBR = 1/256, 256x256x3, 16-QAM, r = 1/2, b_token = 12,
//    key_count = 32 -> N_s = 768, tokens_sent = 128, n_t = 96 (exact).
Outcome criterion_2() {
    const FrameConfig frame;  // defaults: 1/256, 256x256, b=12, key=32, N=256
    const QppTable qpp = QppTable::load("data/qpp_table.txt");
    const uint64_t ns = frame.symbol_budget();
    const DetailBudget budget = compute_detail_budget(frame, {1, 2}, 4);
    const TransmitPlan plan = plan_transmission(frame, {1, 2}, 4, qpp);

    std::ostringstream d;
    d << "N_s=" << ns << " tokens=" << plan.tokens << " n_t=" << budget.n_t;
    const bool pass =
        ns == 768 && budget.feasible && budget.n_t == 96 && plan.feasible && plan.tokens == 128;
    return {pass, d.str()};
}

// ---------------------------------------------------------------------------
// 3. Turbo waterfall: rate 1/3, block 1024, BPSK/AWGN, Eb/N0 = 2 dB,
//    6 iterations, >= 1e6 info bits -> BER <= 1e-3, < 5 min.
Outcome criterion_3() {
    TurboConfig cfg;
    cfg.qpp = QppTable::load("data/qpp_table.txt");
    cfg.iterations = 6;
    const uint32_t block_len = 1024, blocks = 980;  // 980 * 1024 > 1e6 bits
    const double rate =
        static_cast<double>(block_len) / static_cast<double>(turbo_coded_length(block_len));
    const double esn0_db = 2.0 + 10.0 * std::log10(rate);  // BPSK: Es = Eb * r
    const auto spec = ConstellationSpec::make(1);

    const auto start = Clock::now();
    size_t errors = 0;
    for (uint32_t b = 0; b < blocks; ++b) {
        const auto info = random_bits(block_len, Rng::derive_seed(42, 1, b));
        const auto coded = turbo_encode(info, cfg);
        ChannelParams params;
        params.snr_db = esn0_db;
        params.seed = Rng::derive_seed(42, 2, b);
        const auto llrs =
            demodulate_soft(awgn_channel(modulate(coded, spec), params), spec, params);
        const auto decoded = turbo_decode(llrs, block_len, cfg);
        for (size_t i = 0; i < info.size(); ++i) errors += decoded[i] != info[i];
    }
    const double ber = static_cast<double>(errors) / (static_cast<double>(block_len) * blocks);
    const double elapsed = seconds_since(start);

    std::ostringstream d;
    d << "ber=" << ber << " over " << block_len * blocks << " bits, elapsed=" << elapsed << "s";
    return {ber <= 1e-3 && elapsed < 300.0, d.str()};
}

// ---------------------------------------------------------------------------
// 4. Uncoded BPSK BER matches Q(sqrt(2 Es/N0)) within +-10% at 0/2/4 dB.
Outcome criterion_4() {
    const auto spec = ConstellationSpec::make(1);
    const size_t n_bits = 1u << 20;  // > 1e6
    std::ostringstream d;
    bool pass = true;
    for (const double snr : {0.0, 2.0, 4.0}) {
        const auto bits = random_bits(n_bits, 1000 + static_cast<uint64_t>(snr));
        ChannelParams params;
        params.snr_db = snr;
        params.seed = 2000 + static_cast<uint64_t>(snr);
        const auto hard =
            demodulate_hard(awgn_channel(modulate(bits, spec), params), spec, params.h);
        size_t errors = 0;
        for (size_t i = 0; i < n_bits; ++i) errors += hard[i] != bits[i];
        const double ber = static_cast<double>(errors) / static_cast<double>(n_bits);
        const double theory = q_function(std::sqrt(2.0 * std::pow(10.0, snr / 10.0)));
        const double rel = std::abs(ber - theory) / theory;
        d << snr << "dB:" << ber << "/" << theory << " (" << rel * 100 << "%) ";
        pass = pass && rel <= 0.10;
    }
    return {pass, d.str()};
}

// ---------------------------------------------------------------------------
// 5. Graceful degradation: at 6 dB with the default table, PSNR strictly
//    increases across CBR {0.001, 0.003, 0.006} on every bundled image; and
//    PSNR at CBR 1/256 is non-decreasing across SNR {1, 6, 11} dB, >= 20
//    trials per point.
Outcome criterion_5() {
    const Codebook cb = Codebook::load("data/codebook_k4096_d4.rtcb");
    std::ostringstream d;
    bool pass = true;

    const auto psnr_curve = [&](const ImageBuffer& img, SweepAxis axis,
                                const std::vector<double>& values, uint32_t trials,
                                uint64_t seed, double snr) {
        PipelineConfig cfg = base_config();
        cfg.snr_db = snr;
        std::ostringstream sink;
        const auto rows = sweep(cfg, cb, img, axis, values, trials, seed, sink);
        std::vector<double> psnr;
        for (const auto& row : rows) {
            const auto fields = split_csv(row);
            if (fields.size() != 11 || fields[10] != "ok") return std::vector<double>{};
            psnr.push_back(std::stod(fields[9]));
        }
        return psnr;
    };

    for (size_t i = 0; i < kCorpus.size(); ++i) {
        const ImageBuffer img = load_image(kCorpus[i]);

        const auto cbr_psnr =
            psnr_curve(img, SweepAxis::kCbr, {0.001, 0.003, 0.006}, 30, 100 + i, 6.0);
        const bool cbr_ok = cbr_psnr.size() == 3 && cbr_psnr[0] < cbr_psnr[1] &&
                            cbr_psnr[1] < cbr_psnr[2];

        const auto snr_psnr =
            psnr_curve(img, SweepAxis::kSnrDb, {1.0, 6.0, 11.0}, 20, 200 + i, 6.0);
        const bool snr_ok = snr_psnr.size() == 3 && snr_psnr[0] <= snr_psnr[1] &&
                            snr_psnr[1] <= snr_psnr[2];

        d << "img" << i + 1 << " cbr=" << (cbr_ok ? "up" : "NOT-UP")
          << " snr=" << (snr_ok ? "up" : "NOT-UP") << " ";
        pass = pass && cbr_ok && snr_ok;
    }
    return {pass, d.str()};
}

// ---------------------------------------------------------------------------
// 6. Zero-out information gradient: fixed-seed reference run (< 2 min);
//    MSE over t in {4, 8, 12, 16} non-increasing; MSE(16) < 25% of untrained.
Outcome criterion_6() {
    const uint32_t p = 64;
    size_t count = 0;
    uint32_t file_p = 0;
    const auto data = load_patches("data/trainset.rtpd", &count, &file_p);
    if (file_p != p || count < 1024) return {false, "trainset fixture missing or malformed"};

    TrainConfig cfg;  // defaults: key 4, batch 32, lr 0.05, 2000 steps, seed 1
    TinyAutoencoder model = TinyAutoencoder::init(p, 16, 4, 128, cfg.seed);
    const std::vector<uint32_t> t_values = {4, 8, 12, 16};
    const double untrained = evaluate_information_gradient(model, data, count, t_values)
                                 .back()
                                 .second;

    const auto start = Clock::now();
    Rng rng(Rng::derive_seed(cfg.seed, 0x747261696e, 0));
    std::vector<double> batch(static_cast<size_t>(cfg.batch_size) * p);
    for (uint32_t step = 0; step < cfg.steps; ++step) {
        for (uint32_t b = 0; b < cfg.batch_size; ++b) {
            const size_t idx = rng.uniform_int(count);
            std::copy_n(data.begin() + idx * p, p, batch.begin() + static_cast<size_t>(b) * p);
        }
        train_step(model, batch, cfg.batch_size, cfg, rng);
    }
    const double elapsed = seconds_since(start);

    const auto curve = evaluate_information_gradient(model, data, count, t_values);
    bool monotone = true;
    std::ostringstream d;
    d << "curve=";
    for (size_t i = 0; i < curve.size(); ++i) {
        d << curve[i].second << (i + 1 < curve.size() ? "/" : "");
        if (i > 0) monotone = monotone && curve[i].second <= curve[i - 1].second + 1e-6;
    }
    const bool improved = curve.back().second < 0.25 * untrained;
    d << " untrained=" << untrained << " elapsed=" << elapsed << "s";
    return {monotone && improved && elapsed < 120.0, d.str()};
}

// ---------------------------------------------------------------------------
// 7. Gradient check: analytic gradients match central finite differences
//    within 1e-4 relative, 10 random configurations.
Outcome criterion_7() {
    const auto fd_gradient = [](TinyAutoencoder model,
                                std::vector<double> TinyAutoencoder::*tensor,
                                const std::vector<double>& batch, size_t count, uint32_t t) {
        const double eps = 1e-5;
        auto& w = model.*tensor;
        std::vector<double> grad(w.size());
        for (size_t i = 0; i < w.size(); ++i) {
            const double saved = w[i];
            w[i] = saved + eps;
            const double lp = loss_and_gradients(model, batch, count, t, nullptr);
            w[i] = saved - eps;
            const double lm = loss_and_gradients(model, batch, count, t, nullptr);
            w[i] = saved;
            grad[i] = (lp - lm) / (2.0 * eps);
        }
        return grad;
    };
    const auto max_rel_err = [](const std::vector<double>& a, const std::vector<double>& b) {
        double worst = 0.0;
        for (size_t i = 0; i < a.size(); ++i) {
            const double scale = std::max({std::abs(a[i]), std::abs(b[i]), 1e-6});
            worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
        }
        return worst;
    };

    Rng meta(11);
    double worst = 0.0;
    for (int config = 0; config < 10; ++config) {
        const uint32_t p = 4 + static_cast<uint32_t>(meta.uniform_int(4));
        const uint32_t tokens = 3 + static_cast<uint32_t>(meta.uniform_int(3));
        const uint32_t dim = 1 + static_cast<uint32_t>(meta.uniform_int(2));
        const uint32_t hidden = 5 + static_cast<uint32_t>(meta.uniform_int(4));
        const uint32_t t = static_cast<uint32_t>(meta.uniform_int(tokens + 1));
        const TinyAutoencoder model = TinyAutoencoder::init(p, tokens, dim, hidden, 300 + config);

        Rng rng(400 + config);
        std::vector<double> batch(3 * p);
        for (auto& v : batch) v = rng.uniform();

        Gradients grads;
        loss_and_gradients(model, batch, 3, t, &grads);
        worst = std::max(
            {worst,
             max_rel_err(grads.w1, fd_gradient(model, &TinyAutoencoder::w1, batch, 3, t)),
             max_rel_err(grads.b1, fd_gradient(model, &TinyAutoencoder::b1, batch, 3, t)),
             max_rel_err(grads.w2, fd_gradient(model, &TinyAutoencoder::w2, batch, 3, t)),
             max_rel_err(grads.b2, fd_gradient(model, &TinyAutoencoder::b2, batch, 3, t)),
             max_rel_err(grads.w3, fd_gradient(model, &TinyAutoencoder::w3, batch, 3, t)),
             max_rel_err(grads.b3, fd_gradient(model, &TinyAutoencoder::b3, batch, 3, t)),
             max_rel_err(grads.w4, fd_gradient(model, &TinyAutoencoder::w4, batch, 3, t)),
             max_rel_err(grads.b4, fd_gradient(model, &TinyAutoencoder::b4, batch, 3, t))});
    }
    std::ostringstream d;
    d << "worst relative error " << worst << " over 10 configurations";
    return {worst <= 1e-4, d.str()};
}

// ---------------------------------------------------------------------------
// 8. Oracle suites: quantize == exhaustive nearest neighbor (1000 cases);
//    pack/unpack bijection; QPP bijectivity for every fixture length;
//    max-log BCJR hard output == Viterbi on 100 short blocks; Gray adjacency
//    + unit energy exhaustive for m in {1, 2, 4, 6}.
Outcome criterion_8() {
    std::ostringstream d;

    // Quantize vs exhaustive nearest-neighbor search, ties to lowest index.
    const Codebook cb = Codebook::load("data/codebook_k4096_d4.rtcb");
    bool quantize_ok = true;
    {
        Rng rng(55);
        std::vector<double> v(cb.dim());
        for (int trial = 0; trial < 1000 && quantize_ok; ++trial) {
            for (auto& x : v) x = rng.uniform() * 2.0 - 1.0;
            uint32_t best = 0;
            double best_dist = std::numeric_limits<double>::infinity();
            for (uint32_t k = 0; k < cb.size(); ++k) {
                const auto cw = cb.codeword(k);
                double dist = 0.0;
                for (uint32_t j = 0; j < cb.dim(); ++j) {
                    const double diff = v[j] - cw[j];
                    dist += diff * diff;
                }
                if (dist < best_dist) {
                    best_dist = dist;
                    best = k;
                }
            }
            quantize_ok = quantize(v, cb) == best;
        }
    }
    d << "quantize=" << (quantize_ok ? "ok" : "FAIL");

    // Pack/unpack bijection: exhaustive at 3 bits, randomized at 12.
    bool pack_ok = true;
    {
        for (uint32_t a = 0; a < 8 && pack_ok; ++a) {
            for (uint32_t b = 0; b < 8 && pack_ok; ++b) {
                const std::vector<uint32_t> tokens = {a, b};
                pack_ok = unpack_tokens(pack_tokens(tokens, 3), 3, 2) == tokens;
            }
        }
        Rng rng(66);
        for (int trial = 0; trial < 500 && pack_ok; ++trial) {
            const size_t n = 1 + rng.uniform_int(64);
            std::vector<uint32_t> tokens(n);
            for (auto& t : tokens) t = static_cast<uint32_t>(rng.uniform_int(4096));
            pack_ok = unpack_tokens(pack_tokens(tokens, 12), 12, n) == tokens;
        }
    }
    d << " pack=" << (pack_ok ? "ok" : "FAIL");

    // QPP bijectivity for every fixture length.
    bool qpp_ok = true;
    {
        const QppTable qpp = QppTable::load("data/qpp_table.txt");
        for (const auto& [len, params] : qpp.entries()) {
            const auto perm = qpp_interleave(len, params.first, params.second);
            std::vector<uint8_t> seen(len, 0);
            for (const uint32_t idx : perm) {
                if (idx >= len || seen[idx]) qpp_ok = false;
                if (!qpp_ok) break;
                seen[idx] = 1;
            }
            if (!qpp_ok) break;
        }
        d << " qpp=" << (qpp_ok ? "ok" : "FAIL") << "(" << qpp.entries().size() << " lengths)";
    }

    // Max-log BCJR hard decisions equal Viterbi ML decisions, 100 noisy blocks.
    bool bcjr_ok = true;
    {
        const auto spec = ConstellationSpec::make(1);
        for (int trial = 0; trial < 100 && bcjr_ok; ++trial) {
            const auto info = random_bits(40, 700 + trial);
            const auto ref = oracles::rsc_encode_ref(info);
            std::vector<uint8_t> coded;
            coded.insert(coded.end(), info.begin(), info.end());
            coded.insert(coded.end(), ref.parity.begin(), ref.parity.end());
            coded.insert(coded.end(), ref.tail.begin(), ref.tail.end());

            ChannelParams params;
            params.snr_db = 1.0;
            params.seed = 800 + trial;
            const auto llrs =
                demodulate_soft(awgn_channel(modulate(coded, spec), params), spec, params);
            const LlrVector sys(llrs.begin(), llrs.begin() + 40);
            const LlrVector par(llrs.begin() + 40, llrs.begin() + 80);
            const LlrVector tail(llrs.begin() + 80, llrs.end());

            const auto app = bcjr_decode(sys, par, tail, BcjrAlgo::kMaxLog);
            const auto viterbi = oracles::viterbi_decode_ref(sys, par, tail);
            for (size_t i = 0; i < 40; ++i) {
                if ((app[i] < 0.0 ? 1 : 0) != viterbi[i]) bcjr_ok = false;
            }
        }
    }
    d << " bcjr=" << (bcjr_ok ? "ok" : "FAIL");

    // Gray adjacency + unit average energy, exhaustive per order.
    bool gray_ok = true;
    {
        for (const uint32_t m : {1u, 2u, 4u, 6u}) {
            const auto spec = ConstellationSpec::make(m);
            double energy = 0.0;
            for (const auto& pt : spec.points) energy += std::norm(pt);
            energy /= static_cast<double>(spec.points.size());
            if (std::abs(energy - 1.0) > 1e-12) gray_ok = false;

            double min_spacing = std::numeric_limits<double>::infinity();
            for (size_t a = 0; a < spec.points.size(); ++a) {
                for (size_t b = a + 1; b < spec.points.size(); ++b) {
                    min_spacing = std::min(min_spacing, std::abs(spec.points[a] - spec.points[b]));
                }
            }
            for (size_t a = 0; a < spec.points.size(); ++a) {
                for (size_t b = a + 1; b < spec.points.size(); ++b) {
                    const cplx diff = spec.points[a] - spec.points[b];
                    const bool axis_neighbor =
                        (std::abs(diff.real()) < 1e-12 || std::abs(diff.imag()) < 1e-12) &&
                        std::abs(diff) <= min_spacing * (1.0 + 1e-9);
                    if (axis_neighbor &&
                        std::popcount(static_cast<uint32_t>(a ^ b)) != 1) {
                        gray_ok = false;
                    }
                }
            }
        }
    }
    d << " gray=" << (gray_ok ? "ok" : "FAIL");

    return {quantize_ok && pack_ok && qpp_ok && bcjr_ok && gray_ok, d.str()};
}

}  // namespace

int main() {
    struct Entry {
        const char* name;
        Outcome (*fn)();
    };
    const Entry criteria[] = {
        {"1 clean-channel identity", criterion_1},
        {"2 budget arithmetic", criterion_2},
        {"3 turbo waterfall", criterion_3},
        {"4 uncoded BPSK vs theory", criterion_4},
        {"5 graceful degradation", criterion_5},
        {"6 zero-out information gradient", criterion_6},
        {"7 analytic vs finite-difference gradients", criterion_7},
        {"8 oracle suites", criterion_8},
    };

    int failures = 0;
    for (const auto& entry : criteria) {
        Outcome out;
        try {
            out = entry.fn();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << entry.name << " — "
                  << out.detail << "\n";
        if (!out.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
