#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "resitok/errors.hpp"
#include "resitok/pipeline.hpp"
#include "resitok/rng.hpp"

using namespace resitok;

namespace {

PipelineConfig default_config() {
    PipelineConfig cfg;
    cfg.turbo.qpp = QppTable::load("data/qpp_table.txt");
    return cfg;
}

Codebook load_cb() { return Codebook::load("data/codebook_k4096_d4.rtcb"); }

std::vector<std::string> split_csv(const std::string& row) {
    std::vector<std::string> fields;
    std::stringstream ss(row);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    return fields;
}

}  // namespace

TEST_CASE("noiseless full-budget run equals the tokenizer round trip bit-exactly") {
    const Codebook cb = load_cb();
    PipelineConfig cfg = default_config();
    cfg.snr_db = std::numeric_limits<double>::infinity();
    cfg.mcs_override = true;
    cfg.override_m = 4;
    cfg.override_r = {1, 2};
    cfg.frame.target_cbr = 1.0 / 64.0;  // room for all 256 tokens

    const ImageBuffer img = load_image("data/images/synth01.ppm");
    const auto [recon, report] = transmit(img, cfg, cb, 7);

    CHECK(report.post_fec_ber == 0.0);
    CHECK(report.token_errors == 0);
    CHECK(report.tokens_sent == 256);

    const TokenSequence seq = encode_image(img, cfg.tokenizer, cb);
    const ImageBuffer direct = decode_image(seq, cfg.tokenizer, cb);
    REQUIRE(recon.data.size() == direct.data.size());
    CHECK(recon.data == direct.data);
}

TEST_CASE("reference operating point: 16-QAM r=1/2 at CBR 1/256") {
    const Codebook cb = load_cb();
    PipelineConfig cfg = default_config();
    cfg.snr_db = 6.0;  // default table selects 16qam-1/2

    const ImageBuffer img = load_image("data/images/synth02.ppm");
    const auto [recon, report] = transmit(img, cfg, cb, 3);
    (void)recon;

    CHECK(report.mcs_label == "16qam-1/2");
    CHECK(report.tokens_sent == 128);
    CHECK(report.tokens_budget == 96);
    CHECK(report.symbols == 768);
    CHECK(report.cbr_actual == doctest::Approx(1.0 / 256.0).epsilon(1e-15));
}

TEST_CASE("transmit is deterministic per seed") {
    const Codebook cb = load_cb();
    PipelineConfig cfg = default_config();
    cfg.snr_db = -4.0;  // deep in the qpsk-1/3 waterfall: noise is visible
    const ImageBuffer img = load_image("data/images/synth03.ppm");

    const auto [img1, rep1] = transmit(img, cfg, cb, 99);
    const auto [img2, rep2] = transmit(img, cfg, cb, 99);
    CHECK(img1.data == img2.data);
    CHECK(rep1.pre_fec_ber == rep2.pre_fec_ber);
    CHECK(rep1.post_fec_ber == rep2.post_fec_ber);
    CHECK(rep1.psnr_db == rep2.psnr_db);

    const auto [img3, rep3] = transmit(img, cfg, cb, 100);
    (void)rep3;
    CHECK(img3.data != img1.data);
}

TEST_CASE("report conservation laws") {
    const Codebook cb = load_cb();
    PipelineConfig cfg = default_config();
    const ImageBuffer img = load_image("data/images/synth04.ppm");
    for (const double snr : {1.0, 6.0, 11.0}) {
        cfg.snr_db = snr;
        const auto [recon, rep] = transmit(img, cfg, cb, 5);
        (void)recon;
        const McsEntry entry = cfg.mcs.select(snr);
        CHECK(rep.symbols * entry.bits_per_symbol >= rep.coded_bits);
        CHECK((rep.coded_bits + entry.bits_per_symbol - 1) / entry.bits_per_symbol ==
              rep.symbols);
        CHECK(rep.cbr_actual <= cfg.frame.target_cbr + 1e-12);
        CHECK(rep.cbr_actual == doctest::Approx(rep.symbols / (256.0 * 256.0 * 3.0)));
    }
}

TEST_CASE("wide images tile into independent patches") {
    const Codebook cb = load_cb();
    PipelineConfig cfg = default_config();
    cfg.snr_db = std::numeric_limits<double>::infinity();

    const ImageBuffer img = load_image("data/images/synth_wide.ppm");
    REQUIRE(img.width == 512);
    const auto [recon, report] = transmit(img, cfg, cb, 1);
    CHECK(recon.width == 512);
    CHECK(recon.height == 256);
    CHECK(report.tokens_sent == 2 * 256);  // noiseless SNR selects the top MCS row
    CHECK(report.symbols == 2 * 768);
    // Equal per-patch budgets keep the aggregate CBR at the target.
    CHECK(report.cbr_actual == doctest::Approx(1.0 / 256.0).epsilon(1e-15));
    CHECK(report.post_fec_ber == 0.0);
}

TEST_CASE("images smaller than one patch are rejected") {
    const Codebook cb = load_cb();
    const PipelineConfig cfg = default_config();
    const ImageBuffer img = make_image(128, 128, 0.5);
    CHECK_THROWS_AS(transmit(img, cfg, cb, 1), ArgumentError);
}

TEST_CASE("cross-module config validation") {
    const Codebook cb = load_cb();
    PipelineConfig cfg = default_config();
    cfg.frame.b_token = 10;  // 2^10 != 4096
    CHECK_THROWS_AS(cfg.validate(cb), ConfigError);

    cfg = default_config();
    cfg.mcs_override = true;
    cfg.override_m = 3;
    CHECK_THROWS_AS(cfg.validate(cb), ConfigError);
}

TEST_CASE("single-point sweep row matches a direct transmit call") {
    const Codebook cb = load_cb();
    PipelineConfig cfg = default_config();
    cfg.snr_db = 6.0;
    const ImageBuffer img = load_image("data/images/synth01.ppm");

    std::ostringstream csv;
    const auto rows = sweep(cfg, cb, img, SweepAxis::kSnrDb, {6.0}, 1, 31, csv);
    REQUIRE(rows.size() == 1);
    const auto fields = split_csv(rows[0]);
    REQUIRE(fields.size() == 11);
    CHECK(fields[0] == kSweepSchemaTag);
    CHECK(fields[10] == "ok");

    const uint64_t trial_seed = Rng::derive_seed(31, 1, 0);
    const auto [recon, rep] = transmit(img, cfg, cb, trial_seed);
    (void)recon;
    CHECK(std::stod(fields[1]) == 6.0);
    CHECK(std::stod(fields[3]) == doctest::Approx(rep.cbr_actual));
    CHECK(fields[4] == rep.mcs_label);
    CHECK(std::stoull(fields[5]) == rep.tokens_sent);
    CHECK(std::stod(fields[9]) == doctest::Approx(rep.psnr_db));

    // Header row carries the documented schema.
    const std::string header = csv.str().substr(0, csv.str().find('\n'));
    CHECK(header ==
          "schema_tag,snr_db,target_cbr,cbr_actual,mcs,tokens_sent,pre_fec_ber,post_fec_ber,"
          "token_errors,psnr_db,status");
}

TEST_CASE("sweep over CBR at 6 dB gives a non-decreasing PSNR curve") {
    const Codebook cb = load_cb();
    PipelineConfig cfg = default_config();
    cfg.snr_db = 6.0;
    const ImageBuffer img = load_image("data/images/synth02.ppm");

    std::ostringstream csv;
    const auto rows = sweep(cfg, cb, img, SweepAxis::kCbr, {0.001, 0.003, 0.006}, 12, 17, csv);
    REQUIRE(rows.size() == 3);
    double prev = -1.0;
    for (const auto& row : rows) {
        const auto fields = split_csv(row);
        REQUIRE(fields[10] == "ok");
        const double p = std::stod(fields[9]);
        CHECK(p >= prev);
        prev = p;
    }
}

TEST_CASE("sweep over SNR at CBR 1/256 gives a non-decreasing PSNR curve") {
    const Codebook cb = load_cb();
    PipelineConfig cfg = default_config();
    const ImageBuffer img = load_image("data/images/synth03.ppm");

    std::ostringstream csv;
    const auto rows = sweep(cfg, cb, img, SweepAxis::kSnrDb, {1.0, 6.0, 11.0}, 20, 23, csv);
    REQUIRE(rows.size() == 3);
    double prev = -1.0;
    for (const auto& row : rows) {
        const auto fields = split_csv(row);
        REQUIRE(fields[10] == "ok");
        const double p = std::stod(fields[9]);
        CHECK(p >= prev);
        prev = p;
    }
}

TEST_CASE("per-point sweep failures land in the status column") {
    const Codebook cb = load_cb();
    PipelineConfig cfg = default_config();
    const ImageBuffer img = load_image("data/images/synth01.ppm");

    std::ostringstream csv;
    // 1e-5 CBR cannot carry even the key tokens; the second point is fine.
    const auto rows = sweep(cfg, cb, img, SweepAxis::kCbr, {1e-5, 0.004}, 1, 3, csv);
    REQUIRE(rows.size() == 2);
    CHECK(split_csv(rows[0])[10].find("error") == 0);
    CHECK(split_csv(rows[1])[10] == "ok");
}
