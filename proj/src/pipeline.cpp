#include "resitok/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "resitok/errors.hpp"
#include "resitok/rng.hpp"

namespace resitok {

void PipelineConfig::validate(const Codebook& cb) const {
    tokenizer.validate();
    if ((1u << frame.b_token) != cb.size()) {
        throw ConfigError("b_token does not match codebook size");
    }
    if (cb.dim() != tokenizer.coeffs_per_token) {
        throw ConfigError("codebook dimension does not match tokenizer group size");
    }
    if (frame.key_count != tokenizer.key_count || frame.total_tokens != tokenizer.total_tokens) {
        throw ConfigError("frame token geometry does not match tokenizer");
    }
    if (mcs_override) {
        if (override_m != 1 && override_m != 2 && override_m != 4 && override_m != 6) {
            throw ConfigError("unsupported modulation override");
        }
        if (!rate_supported(override_r)) throw ConfigError("unsupported rate override");
    }
    // Every table entry must be realizable by the FEC and modem.
    for (const auto& e : mcs.entries()) {
        ConstellationSpec::make(e.bits_per_symbol);
        if (!rate_supported(e.code_rate)) {
            throw ConfigError("MCS entry '" + e.label + "' uses an unsupported rate");
        }
    }
}

namespace {

ImageBuffer crop_patch(const ImageBuffer& img, uint32_t y0, uint32_t x0, uint32_t edge) {
    ImageBuffer out = make_image(edge, edge);
    for (uint32_t y = 0; y < edge; ++y) {
        for (uint32_t x = 0; x < edge; ++x) {
            for (uint32_t c = 0; c < 3; ++c) out.at(y, x, c) = img.at(y0 + y, x0 + x, c);
        }
    }
    return out;
}

void paste_patch(ImageBuffer* img, const ImageBuffer& patch, uint32_t y0, uint32_t x0) {
    for (uint32_t y = 0; y < patch.height; ++y) {
        for (uint32_t x = 0; x < patch.width; ++x) {
            for (uint32_t c = 0; c < 3; ++c) img->at(y0 + y, x0 + x, c) = patch.at(y, x, c);
        }
    }
}

}  // namespace

std::pair<ImageBuffer, TransmissionReport> transmit(const ImageBuffer& image,
                                                    const PipelineConfig& cfg, const Codebook& cb,
                                                    uint64_t seed) {
    const auto t_start = std::chrono::steady_clock::now();
    cfg.validate(cb);

    const uint32_t edge = cfg.tokenizer.patch;
    const uint32_t rows = image.height / edge;
    const uint32_t cols = image.width / edge;
    if (rows == 0 || cols == 0) {
        throw ArgumentError("image smaller than one patch (" + std::to_string(edge) + "px)");
    }

    const McsEntry entry = cfg.mcs_override
                               ? McsEntry{cfg.snr_db, cfg.override_m, cfg.override_r, "override"}
                               : cfg.mcs.select(cfg.snr_db);
    const ConstellationSpec constellation = ConstellationSpec::make(entry.bits_per_symbol);
    const uint32_t m = entry.bits_per_symbol;

    // Equal per-patch symbol allocation at the global target CBR.
    FrameConfig frame = cfg.frame;
    frame.image_height = edge;
    frame.image_width = edge;

    const DetailBudget budget = compute_detail_budget(frame, entry.code_rate, m);
    const TransmitPlan plan = plan_transmission(frame, entry.code_rate, m, cfg.turbo.qpp);
    if (!plan.feasible) {
        throw ProtocolError("infeasible budget: key tokens do not fit at CBR " +
                          std::to_string(frame.target_cbr) + " with " + entry.label);
    }

    TransmissionReport report;
    report.snr_db = cfg.snr_db;
    report.mcs_label = entry.label;
    report.tokens_budget = std::min<uint32_t>(budget.n_t, frame.total_tokens - frame.key_count);

    ImageBuffer reconstructed = make_image(rows * edge, cols * edge);
    ImageBuffer reference = make_image(rows * edge, cols * edge);

    uint64_t pre_fec_errors = 0, post_fec_errors = 0;
    uint32_t patch_index = 0;
    for (uint32_t py = 0; py < rows; ++py) {
        for (uint32_t px = 0; px < cols; ++px, ++patch_index) {
            const ImageBuffer patch = crop_patch(image, py * edge, px * edge, edge);
            paste_patch(&reference, patch, py * edge, px * edge);

            const TokenSequence seq = encode_image(patch, cfg.tokenizer, cb);
            const auto sent = select_tokens(seq, plan.tokens - frame.key_count);
            Bitstream bs = pack_tokens(sent, frame.b_token);

            // Zero fill up to the FEC block length; count known out of band.
            std::vector<uint8_t> info(plan.block_len, 0);
            for (size_t i = 0; i < bs.bit_length; ++i) info[i] = bs.bit(i);

            const auto coded = turbo_encode(info, cfg.turbo);
            auto matched = rate_match(coded, plan.block_len, entry.code_rate);
            const size_t coded_len = matched.size();
            matched.resize((coded_len + m - 1) / m * m, 0);  // pad to a whole symbol

            const auto symbols = modulate(matched, constellation);
            ChannelParams channel;
            channel.snr_db = cfg.snr_db;
            channel.h = cfg.channel_gain;
            channel.seed = Rng::derive_seed(seed, 0x7061746368ULL /*"patch"*/, patch_index);
            const auto received = awgn_channel(symbols, channel);

            const auto hard = demodulate_hard(received, constellation, channel.h);
            for (size_t i = 0; i < coded_len; ++i) pre_fec_errors += hard[i] != matched[i];

            auto llrs = demodulate_soft(received, constellation, channel);
            llrs.resize(coded_len);  // drop symbol-padding bits
            const auto mother = rate_recover(llrs, entry.code_rate, plan.block_len);
            const auto decoded = turbo_decode(mother, plan.block_len, cfg.turbo);
            for (size_t i = 0; i < decoded.size(); ++i) post_fec_errors += decoded[i] != info[i];

            Bitstream rx;
            rx.bit_length = bs.bit_length;
            rx.bytes.assign((rx.bit_length + 7) / 8, 0);
            for (size_t i = 0; i < rx.bit_length; ++i) {
                if (decoded[i]) rx.bytes[i / 8] |= 1u << (7 - i % 8);
            }
            // Corrupted token indices pass through unchanged; zero padding
            // covers only the untransmitted suffix.
            const auto rx_tokens = unpack_tokens(rx, frame.b_token, sent.size());
            for (size_t i = 0; i < sent.size(); ++i) report.token_errors += rx_tokens[i] != sent[i];

            const TokenSequence padded = zero_pad(rx_tokens, frame.key_count, frame.total_tokens);
            paste_patch(&reconstructed, decode_image(padded, cfg.tokenizer, cb), py * edge,
                        px * edge);

            report.tokens_sent += sent.size();
            report.info_bits += plan.block_len;
            report.coded_bits += coded_len;
            report.symbols += symbols.size();
        }
    }

    report.pre_fec_ber =
        report.coded_bits ? static_cast<double>(pre_fec_errors) / report.coded_bits : 0.0;
    report.post_fec_ber =
        report.info_bits ? static_cast<double>(post_fec_errors) / report.info_bits : 0.0;
    report.cbr_actual = compute_cbr(report.symbols, reference.height, reference.width);
    report.psnr_db = psnr(reference, reconstructed);
    report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                               t_start)
                         .count();
    return {std::move(reconstructed), report};
}

std::vector<std::string> sweep(const PipelineConfig& cfg, const Codebook& cb,
                               const ImageBuffer& image, SweepAxis axis,
                               const std::vector<double>& values, uint32_t trials, uint64_t seed,
                               std::ostream& csv) {
    if (trials == 0) throw ArgumentError("sweep: trials must be >= 1");
    csv << "schema_tag,snr_db,target_cbr,cbr_actual,mcs,tokens_sent,pre_fec_ber,post_fec_ber,"
           "token_errors,psnr_db,status\n";

    std::vector<std::string> rows;
    for (size_t pi = 0; pi < values.size(); ++pi) {
        PipelineConfig point = cfg;
        if (axis == SweepAxis::kSnrDb) {
            point.snr_db = values[pi];
        } else {
            point.frame.target_cbr = values[pi];
        }

        std::ostringstream row;
        row.precision(10);
        try {
            double psnr_sum = 0.0, pre_sum = 0.0, post_sum = 0.0, cbr_sum = 0.0;
            uint64_t tokens = 0, token_errs = 0;
            std::string label;
            for (uint32_t trial = 0; trial < trials; ++trial) {
                const uint64_t trial_seed = Rng::derive_seed(seed, pi + 1, trial);
                const auto [img, rep] = transmit(image, point, cb, trial_seed);
                (void)img;
                psnr_sum += rep.psnr_db;
                pre_sum += rep.pre_fec_ber;
                post_sum += rep.post_fec_ber;
                cbr_sum += rep.cbr_actual;
                tokens = rep.tokens_sent;
                token_errs += rep.token_errors;
                label = rep.mcs_label;
            }
            row << kSweepSchemaTag << "," << point.snr_db << "," << point.frame.target_cbr << ","
                << cbr_sum / trials << "," << label << "," << tokens << "," << pre_sum / trials
                << "," << post_sum / trials << "," << token_errs << "," << psnr_sum / trials
                << ",ok";
        } catch (const std::exception& e) {
            std::string what = e.what();
            for (char& c : what) {
                if (c == ',' || c == '\n') c = ';';
            }
            row << kSweepSchemaTag << "," << point.snr_db << "," << point.frame.target_cbr
                << ",,,,,,,,error: " << what;
        }
        rows.push_back(row.str());
        csv << rows.back() << "\n";
    }
    return rows;
}

}  // namespace resitok
