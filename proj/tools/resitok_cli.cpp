// resitok command line front end.
//
// Subcommands: codebook-train, transmit, sweep, train-zeroout,
// eval-gradient, mcs-calibrate. Every option can also come from a plain
// key=value config file (--config); command-line flags override file values.
//
// Exit codes: 0 success, 2 configuration/argument error, 3 I/O error,
// 4 infeasible budget / protocol / training failure.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "resitok/amc.hpp"
#include "resitok/dct.hpp"
#include "resitok/errors.hpp"
#include "resitok/fec.hpp"
#include "resitok/image.hpp"
#include "resitok/modem.hpp"
#include "resitok/pipeline.hpp"
#include "resitok/rng.hpp"
#include "resitok/tokenizer.hpp"
#include "resitok/zeroout.hpp"

using namespace resitok;

namespace {

std::vector<double> parse_value_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ArgumentError("cannot parse numeric list item '" + item + "'");
        }
    }
    if (out.empty()) throw ArgumentError("empty value list");
    return out;
}

struct PipelineOptions {
    std::string codebook_path = "data/codebook_k4096_d4.rtcb";
    std::string qpp_path = "data/qpp_table.txt";
    std::string mcs_path;  // empty -> built-in default table
    double snr_db = 6.0;
    double cbr = 1.0 / 256.0;
    uint32_t patch = 256;
    uint32_t block = 8;
    uint32_t dim = 4;
    uint32_t tokens = 256;
    uint32_t key_count = 32;
    uint32_t b_token = 12;
    std::string override_mod;   // "", "bpsk", "qpsk", "16qam", "64qam"
    std::string override_rate;  // "", "1/3", ...
    uint64_t seed = 1;
};

void add_pipeline_options(CLI::App* cmd, PipelineOptions* o) {
    cmd->add_option("--codebook", o->codebook_path, "VQ codebook file (.rtcb)");
    cmd->add_option("--qpp-table", o->qpp_path, "QPP interleaver table file");
    cmd->add_option("--mcs-table", o->mcs_path, "MCS table file (default: built-in)");
    cmd->add_option("--snr-db", o->snr_db, "channel Es/N0 in dB");
    cmd->add_option("--cbr", o->cbr, "target channel bandwidth ratio");
    cmd->add_option("--patch", o->patch, "patch edge in pixels");
    cmd->add_option("--block", o->block, "transform block size");
    cmd->add_option("--dim", o->dim, "coefficients per token (d)");
    cmd->add_option("--tokens", o->tokens, "total tokens per patch (N)");
    cmd->add_option("--key-count", o->key_count, "always-sent key tokens");
    cmd->add_option("--b-token", o->b_token, "bits per token index");
    cmd->add_option("--modulation", o->override_mod,
                    "fixed modulation (bpsk/qpsk/16qam/64qam) instead of AMC");
    cmd->add_option("--rate", o->override_rate, "fixed code rate (e.g. 1/2) instead of AMC");
    cmd->add_option("--seed", o->seed, "RNG seed");
}

uint32_t modulation_order(const std::string& name) {
    if (name == "bpsk") return 1;
    if (name == "qpsk") return 2;
    if (name == "16qam") return 4;
    if (name == "64qam") return 6;
    throw ArgumentError("unknown modulation '" + name + "'");
}

PipelineConfig build_pipeline_config(const PipelineOptions& o) {
    PipelineConfig cfg;
    cfg.tokenizer.patch = o.patch;
    cfg.tokenizer.block = o.block;
    cfg.tokenizer.coeffs_per_token = o.dim;
    cfg.tokenizer.total_tokens = o.tokens;
    cfg.tokenizer.key_count = o.key_count;
    cfg.frame.b_token = o.b_token;
    cfg.frame.key_count = o.key_count;
    cfg.frame.total_tokens = o.tokens;
    cfg.frame.target_cbr = o.cbr;
    cfg.turbo.qpp = QppTable::load(o.qpp_path);
    if (!o.mcs_path.empty()) cfg.mcs = McsTable::load(o.mcs_path);
    cfg.snr_db = o.snr_db;
    if (!o.override_mod.empty() || !o.override_rate.empty()) {
        if (o.override_mod.empty() || o.override_rate.empty()) {
            throw ArgumentError("--modulation and --rate must be given together");
        }
        cfg.mcs_override = true;
        cfg.override_m = modulation_order(o.override_mod);
        cfg.override_r = parse_rate(o.override_rate);
    }
    return cfg;
}

void print_report(const TransmissionReport& r) {
    std::cout << "mcs           " << r.mcs_label << "\n"
              << "snr_db        " << r.snr_db << "\n"
              << "cbr_actual    " << r.cbr_actual << "\n"
              << "tokens_sent   " << r.tokens_sent << "\n"
              << "tokens_budget " << r.tokens_budget << "\n"
              << "info_bits     " << r.info_bits << "\n"
              << "coded_bits    " << r.coded_bits << "\n"
              << "symbols       " << r.symbols << "\n"
              << "pre_fec_ber   " << r.pre_fec_ber << "\n"
              << "post_fec_ber  " << r.post_fec_ber << "\n"
              << "token_errors  " << r.token_errors << "\n"
              << "psnr_db       " << r.psnr_db << "\n"
              << "wall_ms       " << r.wall_ms << "\n";
}

int cmd_codebook_train(const std::vector<std::string>& images, const PipelineOptions& o,
                       const std::string& out, uint32_t k, int max_iter) {
    if (images.empty()) throw ArgumentError("codebook-train: at least one --image required");
    DctTokenizerConfig tok;
    tok.patch = o.patch;
    tok.block = o.block;
    tok.coeffs_per_token = o.dim;
    tok.total_tokens = o.tokens;
    tok.key_count = o.key_count;
    tok.validate();

    std::vector<double> samples;
    for (const auto& path : images) {
        const ImageBuffer img = load_image(path);
        const uint32_t rows = img.height / tok.patch;
        const uint32_t cols = img.width / tok.patch;
        if (rows == 0 || cols == 0) {
            throw ArgumentError("image " + path + " smaller than one patch");
        }
        for (uint32_t py = 0; py < rows; ++py) {
            for (uint32_t px = 0; px < cols; ++px) {
                ImageBuffer patch = make_image(tok.patch, tok.patch);
                for (uint32_t y = 0; y < tok.patch; ++y) {
                    for (uint32_t x = 0; x < tok.patch; ++x) {
                        for (uint32_t c = 0; c < 3; ++c) {
                            patch.at(y, x, c) = img.at(py * tok.patch + y, px * tok.patch + x, c);
                        }
                    }
                }
                const auto groups = extract_groups(patch, tok);
                samples.insert(samples.end(), groups.begin(), groups.end());
            }
        }
    }
    const size_t count = samples.size() / tok.coeffs_per_token;
    std::cout << "training k-means: " << count << " samples, K=" << k << ", d="
              << tok.coeffs_per_token << "\n";
    std::vector<double> history;
    const Codebook cb =
        train_codebook(samples, count, tok.coeffs_per_token, k, o.seed, max_iter, 1e-6, &history);
    cb.save(out);
    std::cout << "iterations " << history.size() << ", final objective "
              << (history.empty() ? 0.0 : history.back()) << "\n"
              << "wrote " << out << "\n";
    return 0;
}

int cmd_mcs_calibrate(const std::string& qpp_path, uint32_t block_len, uint32_t blocks,
                      double target_bler, double snr_min, double snr_max, double snr_step,
                      uint64_t seed) {
    TurboConfig turbo;
    turbo.qpp = QppTable::load(qpp_path);
    if (!turbo.qpp.supports(block_len)) {
        throw ConfigError("QPP table has no entry for block length " + std::to_string(block_len));
    }
    struct Candidate {
        uint32_t m;
        CodeRate r;
        std::string label;
    };
    const std::vector<Candidate> candidates = {
        {2, {1, 3}, "qpsk-1/3"},  {2, {1, 2}, "qpsk-1/2"},   {4, {1, 3}, "16qam-1/3"},
        {4, {1, 2}, "16qam-1/2"}, {4, {3, 4}, "16qam-3/4"},  {6, {2, 3}, "64qam-2/3"},
    };
    std::cout << "# threshold = lowest SNR on the grid with BLER <= " << target_bler << " over "
              << blocks << " blocks of " << block_len << " bits\n"
              << "# label m rate threshold_db\n";
    for (const auto& c : candidates) {
        const ConstellationSpec spec = ConstellationSpec::make(c.m);
        double threshold = std::nan("");
        for (double snr = snr_min; snr <= snr_max + 1e-9; snr += snr_step) {
            uint32_t block_errors = 0;
            for (uint32_t b = 0; b < blocks; ++b) {
                Rng rng(Rng::derive_seed(seed, c.m * 100 + c.r.num * 10 + c.r.den, b));
                std::vector<uint8_t> info(block_len);
                for (auto& bit : info) bit = static_cast<uint8_t>(rng.next_u64() & 1);
                const auto coded = turbo_encode(info, turbo);
                auto matched = rate_match(coded, block_len, c.r);
                const size_t coded_len = matched.size();
                matched.resize((coded_len + c.m - 1) / c.m * c.m, 0);
                const auto symbols = modulate(matched, spec);
                ChannelParams ch;
                ch.snr_db = snr;
                ch.seed = Rng::derive_seed(seed, 0x63616c /*"cal"*/, b * 1000 + c.m);
                auto llrs = demodulate_soft(awgn_channel(symbols, ch), spec, ch);
                llrs.resize(coded_len);
                const auto decoded =
                    turbo_decode(rate_recover(llrs, c.r, block_len), block_len, turbo);
                if (decoded != info) ++block_errors;
                // Early exit once the target is unreachable at this SNR.
                if (block_errors > static_cast<uint32_t>(target_bler * blocks)) break;
            }
            if (block_errors <= static_cast<uint32_t>(target_bler * blocks)) {
                threshold = snr;
                break;
            }
        }
        std::cout << c.label << " " << c.m << " " << c.r.num << "/" << c.r.den << " ";
        if (std::isnan(threshold)) {
            std::cout << "unreachable\n";
        } else {
            std::cout << threshold << "\n";
        }
    }
    return 0;
}

int run(int argc, char** argv) {
    CLI::App app{"resitok: resilient progressive-token image transmission simulator"};
    app.set_config("--config", "", "plain key=value config file; flags take precedence");
    PipelineOptions popt;

    // ---- codebook-train ----
    auto* train = app.add_subcommand("codebook-train", "train a VQ codebook with k-means");
    std::vector<std::string> train_images;
    std::string train_out = "codebook.rtcb";
    uint32_t train_k = 4096;
    int train_iters = 100;
    train->add_option("--image", train_images, "training image (repeatable)")->required();
    train->add_option("--out", train_out, "output codebook path");
    train->add_option("--k", train_k, "codebook size");
    train->add_option("--max-iter", train_iters, "k-means iteration cap");
    add_pipeline_options(train, &popt);

    // ---- transmit ----
    auto* tx = app.add_subcommand("transmit", "run one end-to-end transmission");
    std::string tx_image, tx_out;
    tx->add_option("--image", tx_image, "input image (.ppm/.png)")->required();
    tx->add_option("--out", tx_out, "reconstructed image output path");
    add_pipeline_options(tx, &popt);

    // ---- sweep ----
    auto* sw = app.add_subcommand("sweep", "grid sweep over SNR or CBR, CSV output");
    std::string sw_image, sw_axis = "snr", sw_values = "1,6,11", sw_csv;
    uint32_t sw_trials = 1;
    sw->add_option("--image", sw_image, "input image")->required();
    sw->add_option("--axis", sw_axis, "sweep axis: snr | cbr");
    sw->add_option("--values", sw_values, "comma-separated grid values");
    sw->add_option("--trials", sw_trials, "trials per grid point");
    sw->add_option("--csv", sw_csv, "CSV output path (default: stdout)");
    add_pipeline_options(sw, &popt);

    // ---- train-zeroout ----
    auto* zt = app.add_subcommand("train-zeroout", "train the tiny autoencoder with zero-out");
    std::string zt_data = "data/trainset.rtpd", zt_out = "model.rtae";
    uint32_t zt_tokens = 16, zt_dim = 4, zt_hidden = 128, zt_key = 4, zt_batch = 32,
                    zt_steps = 2000;
    double zt_lr = 0.05;
    uint64_t zt_seed = 1;
    zt->add_option("--data", zt_data, "training patches (.rtpd)");
    zt->add_option("--out", zt_out, "output model path (.rtae)");
    zt->add_option("--tokens", zt_tokens, "latent token slots (N)");
    zt->add_option("--dim", zt_dim, "latent dimensions per token (d)");
    zt->add_option("--hidden", zt_hidden, "hidden layer width");
    zt->add_option("--key-count", zt_key, "always-kept key tokens");
    zt->add_option("--batch", zt_batch, "batch size");
    zt->add_option("--lr", zt_lr, "learning rate");
    zt->add_option("--steps", zt_steps, "SGD steps");
    zt->add_option("--seed", zt_seed, "RNG seed");

    // ---- eval-gradient ----
    auto* eg = app.add_subcommand("eval-gradient",
                                  "measure reconstruction MSE per truncation point");
    std::string eg_model, eg_data = "data/trainset.rtpd", eg_tvals = "4,8,12,16";
    eg->add_option("--model", eg_model, "trained model (.rtae)")->required();
    eg->add_option("--data", eg_data, "evaluation patches (.rtpd)");
    eg->add_option("--t-values", eg_tvals, "comma-separated truncation points");

    // ---- mcs-calibrate ----
    auto* mc = app.add_subcommand("mcs-calibrate", "measure MCS activation thresholds");
    std::string mc_qpp = "data/qpp_table.txt";
    uint32_t mc_block = 1024, mc_blocks = 200;
    double mc_bler = 0.10, mc_min = -2.0, mc_max = 20.0, mc_step = 0.5;
    uint64_t mc_seed = 7;
    mc->add_option("--qpp-table", mc_qpp, "QPP interleaver table file");
    mc->add_option("--block", mc_block, "FEC block length");
    mc->add_option("--blocks", mc_blocks, "blocks per SNR point");
    mc->add_option("--target-bler", mc_bler, "block error rate target");
    mc->add_option("--snr-min", mc_min, "grid start (dB)");
    mc->add_option("--snr-max", mc_max, "grid end (dB)");
    mc->add_option("--snr-step", mc_step, "grid step (dB)");
    mc->add_option("--seed", mc_seed, "RNG seed");

    app.require_subcommand(1);
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (train->parsed()) {
        return cmd_codebook_train(train_images, popt, train_out, train_k, train_iters);
    }
    if (tx->parsed()) {
        const PipelineConfig cfg = build_pipeline_config(popt);
        const Codebook cb = Codebook::load(popt.codebook_path);
        const ImageBuffer img = load_image(tx_image);
        const auto [recon, report] = transmit(img, cfg, cb, popt.seed);
        print_report(report);
        if (!tx_out.empty()) save_image(recon, tx_out);
        return 0;
    }
    if (sw->parsed()) {
        const PipelineConfig cfg = build_pipeline_config(popt);
        const Codebook cb = Codebook::load(popt.codebook_path);
        const ImageBuffer img = load_image(sw_image);
        SweepAxis axis;
        if (sw_axis == "snr") {
            axis = SweepAxis::kSnrDb;
        } else if (sw_axis == "cbr") {
            axis = SweepAxis::kCbr;
        } else {
            throw ArgumentError("--axis must be 'snr' or 'cbr'");
        }
        const auto values = parse_value_list(sw_values);
        if (sw_csv.empty()) {
            sweep(cfg, cb, img, axis, values, sw_trials, popt.seed, std::cout);
        } else {
            std::ofstream out(sw_csv);
            if (!out) throw IoError("cannot open " + sw_csv + " for writing");
            sweep(cfg, cb, img, axis, values, sw_trials, popt.seed, out);
        }
        return 0;
    }
    if (zt->parsed()) {
        size_t count = 0;
        uint32_t p = 0;
        const auto data = load_patches(zt_data, &count, &p);
        TinyAutoencoder model = TinyAutoencoder::init(p, zt_tokens, zt_dim, zt_hidden, zt_seed);
        TrainConfig tcfg;
        tcfg.key_count = zt_key;
        tcfg.batch_size = zt_batch;
        tcfg.learning_rate = zt_lr;
        tcfg.steps = zt_steps;
        tcfg.seed = zt_seed;
        Rng rng(Rng::derive_seed(zt_seed, 0x747261696e /*"train"*/, 0));
        std::vector<double> batch(static_cast<size_t>(tcfg.batch_size) * p);
        for (uint32_t step = 0; step < tcfg.steps; ++step) {
            for (uint32_t b = 0; b < tcfg.batch_size; ++b) {
                const size_t idx = rng.uniform_int(count);
                std::copy_n(data.begin() + idx * p, p, batch.begin() + static_cast<size_t>(b) * p);
            }
            const double loss = train_step(model, batch, tcfg.batch_size, tcfg, rng);
            if (step % 200 == 0 || step + 1 == tcfg.steps) {
                std::cout << "step " << step << " loss " << loss << "\n";
            }
        }
        model.save(zt_out);
        std::cout << "wrote " << zt_out << "\n";
        return 0;
    }
    if (eg->parsed()) {
        const TinyAutoencoder model = TinyAutoencoder::load(eg_model);
        size_t count = 0;
        uint32_t p = 0;
        const auto data = load_patches(eg_data, &count, &p);
        if (p != model.p) throw ArgumentError("dataset patch size does not match model");
        const auto tvals_d = parse_value_list(eg_tvals);
        std::vector<uint32_t> tvals;
        for (const double v : tvals_d) tvals.push_back(static_cast<uint32_t>(v));
        const auto curve = evaluate_information_gradient(model, data, count, tvals);
        std::cout << "# t mse\n";
        for (const auto& [t, mse] : curve) std::cout << t << " " << mse << "\n";
        return 0;
    }
    if (mc->parsed()) {
        return cmd_mcs_calibrate(mc_qpp, mc_block, mc_blocks, mc_bler, mc_min, mc_max, mc_step,
                                 mc_seed);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ArgumentError& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const ProtocolError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const FramingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const TrainingError& e) {
        std::cerr << "training error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
