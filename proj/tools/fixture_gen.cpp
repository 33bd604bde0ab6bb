// Generates the data/ fixtures shipped with the repo: synthetic test
// images, the QPP interleaver table, constellation tables, the default MCS
// table, the trainer dataset, and the pretrained codebook. Outputs are
// committed; this tool exists so every fixture is reproducible.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "resitok/amc.hpp"
#include "resitok/dct.hpp"
#include "resitok/fec.hpp"
#include "resitok/image.hpp"
#include "resitok/modem.hpp"
#include "resitok/rng.hpp"
#include "resitok/tokenizer.hpp"
#include "resitok/zeroout.hpp"

using namespace resitok;

namespace {

// Synthetic test image: per-block luma means with a contrast envelope that
// decays along block raster order (so coefficient-group energy is ordered),
// zero-DC cosine texture inside each block, and mild smooth chroma.
// `jitter` > 0 adds per-block contrast variation (used only for codebook
// training images, so quantizer samples are distinct; the bundled corpus
// keeps jitter = 0 so its group-energy profile is exactly monotone).
ImageBuffer synth_image(uint32_t edge, uint64_t seed, double jitter = 0.0) {
    const uint32_t block = 8;
    const uint32_t nb = edge / block;
    Rng rng(seed);
    const double pi = 3.14159265358979323846;
    const double fu = 1.0 + static_cast<double>(rng.uniform_int(3));
    const double fv = 1.0 + static_cast<double>(rng.uniform_int(3));
    const double phase = 2.0 * pi * rng.uniform();
    const double chroma_phase = 2.0 * pi * rng.uniform();

    std::vector<double> luma(static_cast<size_t>(edge) * edge);
    for (uint32_t by = 0; by < nb; ++by) {
        for (uint32_t bx = 0; bx < nb; ++bx) {
            const uint32_t g = by * nb + bx;
            double amp = 0.28 * (0.35 + 0.65 * std::exp(-static_cast<double>(g) / 350.0));
            if (jitter > 0.0) amp *= 1.0 + jitter * (2.0 * rng.uniform() - 1.0);
            const double wave = std::sin(2.0 * pi * (fu * bx + fv * by) / 13.0 + phase);
            const double sign = wave >= 0.0 ? 1.0 : -1.0;
            const double mu = 0.5 + amp * sign;
            const uint32_t tu = 1 + (bx + g) % 3;
            const uint32_t tv = 1 + (by + 2 * g) % 3;
            const double ta = 0.05;
            for (uint32_t y = 0; y < block; ++y) {
                for (uint32_t x = 0; x < block; ++x) {
                    const double tex = ta * std::cos(pi * (x + 0.5) * tu / block) *
                                       std::cos(pi * (y + 0.5) * tv / block);
                    luma[(static_cast<size_t>(by) * block + y) * edge + bx * block + x] = mu + tex;
                }
            }
        }
    }

    ImageBuffer img = make_image(edge, edge);
    for (uint32_t y = 0; y < edge; ++y) {
        for (uint32_t x = 0; x < edge; ++x) {
            const double yv = luma[static_cast<size_t>(y) * edge + x];
            const double cb = 0.02 * std::sin(2.0 * pi * x / 128.0 + chroma_phase) *
                              std::sin(2.0 * pi * y / 96.0);
            const double cr = 0.02 * std::cos(2.0 * pi * x / 96.0) *
                              std::sin(2.0 * pi * y / 128.0 + chroma_phase);
            const double b = cb / 0.564 + yv;
            const double r = cr / 0.713 + yv;
            const double g = (yv - 0.299 * r - 0.114 * b) / 0.587;
            img.at(y, x, 0) = std::clamp(r, 0.0, 1.0);
            img.at(y, x, 1) = std::clamp(g, 0.0, 1.0);
            img.at(y, x, 2) = std::clamp(b, 0.0, 1.0);
        }
    }
    return img;
}

void gen_corpus(const std::string& dir) {
    std::filesystem::create_directories(dir + "/images");
    for (uint32_t i = 0; i < 4; ++i) {
        const auto img = synth_image(256, 1000 + i);
        const std::string path = dir + "/images/synth0" + std::to_string(i + 1) + ".ppm";
        save_ppm(img, path);
        std::cout << "wrote " << path << "\n";
    }
    // One two-patch-wide image for the tiling path.
    ImageBuffer wide = make_image(256, 512);
    const auto left = synth_image(256, 2000);
    const auto right = synth_image(256, 2001);
    for (uint32_t y = 0; y < 256; ++y) {
        for (uint32_t x = 0; x < 256; ++x) {
            for (uint32_t c = 0; c < 3; ++c) {
                wide.at(y, x, c) = left.at(y, x, c);
                wide.at(y, x + 256, c) = right.at(y, x, c);
            }
        }
    }
    save_ppm(wide, dir + "/images/synth_wide.ppm");
    std::cout << "wrote " << dir << "/images/synth_wide.ppm\n";
}

uint32_t cyc_dist(uint32_t a, uint32_t b, uint32_t len) {
    const uint32_t d = a > b ? a - b : b - a;
    return std::min(d, len - d);
}

// Minimum cycle distance over a sliding window; the usual interleaver
// spread figure of merit.
uint32_t spread(const std::vector<uint32_t>& perm, uint32_t window) {
    const uint32_t len = static_cast<uint32_t>(perm.size());
    uint32_t best = len;
    for (uint32_t i = 0; i < len; ++i) {
        for (uint32_t off = 1; off <= window; ++off) {
            const uint32_t j = (i + off) % len;
            const uint32_t d = off + cyc_dist(perm[i], perm[j], len);
            best = std::min(best, d);
        }
    }
    return best;
}

bool is_bijective_qpp(uint32_t len, uint32_t f1, uint32_t f2) {
    try {
        qpp_interleave(len, f1, f2);
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

void gen_qpp(const std::string& dir) {
    std::vector<uint32_t> lengths;
    for (uint32_t k = 40; k <= 512; k += 8) lengths.push_back(k);
    for (uint32_t k = 528; k <= 1024; k += 16) lengths.push_back(k);
    for (uint32_t k = 1056; k <= 2048; k += 32) lengths.push_back(k);
    for (uint32_t k = 2112; k <= 3072; k += 64) lengths.push_back(k);

    // Standard rows kept verbatim where known; everything else is searched.
    const std::map<uint32_t, std::pair<uint32_t, uint32_t>> pinned = {
        {40, {3, 10}},
        {1024, {31, 64}},
    };

    std::ofstream f(dir + "/qpp_table.txt");
    f << "# QPP interleaver parameters: len f1 f2\n"
      << "# pi(i) = (f1*i + f2*i^2) mod len; every row verified bijective.\n"
      << "# Rows are chosen by a deterministic search maximizing the minimum\n"
      << "# windowed cycle distance (window 30); rows for len 40 and 1024 use\n"
      << "# the standard published parameters.\n";
    for (const uint32_t len : lengths) {
        uint32_t best_f1 = 0, best_f2 = 0, best_spread = 0;
        if (const auto it = pinned.find(len); it != pinned.end()) {
            best_f1 = it->second.first;
            best_f2 = it->second.second;
            if (!is_bijective_qpp(len, best_f1, best_f2)) {
                std::cerr << "pinned QPP row not bijective for len " << len << "\n";
                std::exit(1);
            }
        } else {
            // Candidate grids: small odd f1 coprime to len; f2 from simple
            // fractions of len plus small even constants.
            std::vector<uint32_t> f1s;
            for (uint32_t v = 3; f1s.size() < 16 && v < len; v += 2) {
                if (std::gcd(v, len) == 1) f1s.push_back(v);
            }
            std::vector<uint32_t> f2s;
            for (const uint32_t denom : {32u, 16u, 8u, 4u, 2u}) {
                if (len % denom == 0) {
                    for (uint32_t mul = 1; mul < denom; ++mul) {
                        const uint32_t v = len / denom * mul;
                        if (v > 0 && v < len && v % 2 == 0) f2s.push_back(v);
                    }
                }
            }
            for (const uint32_t v : {10u, 12u, 16u, 20u, 24u, 32u, 48u, 64u}) {
                if (v < len) f2s.push_back(v);
            }
            std::sort(f2s.begin(), f2s.end());
            f2s.erase(std::unique(f2s.begin(), f2s.end()), f2s.end());

            for (const uint32_t f1 : f1s) {
                for (const uint32_t f2 : f2s) {
                    if (!is_bijective_qpp(len, f1, f2)) continue;
                    const auto perm = qpp_interleave(len, f1, f2);
                    const uint32_t s = spread(perm, 30);
                    if (s > best_spread) {
                        best_spread = s;
                        best_f1 = f1;
                        best_f2 = f2;
                    }
                }
            }
            if (best_f1 == 0) {
                std::cerr << "no bijective QPP found for len " << len << "\n";
                std::exit(1);
            }
        }
        f << len << " " << best_f1 << " " << best_f2 << "\n";
    }
    std::cout << "wrote " << dir << "/qpp_table.txt (" << lengths.size() << " rows)\n";
}

void gen_constellations(const std::string& dir) {
    const std::pair<uint32_t, const char*> specs[] = {
        {1, "bpsk"}, {2, "qpsk"}, {4, "16qam"}, {6, "64qam"}};
    for (const auto& [m, name] : specs) {
        const auto spec = ConstellationSpec::make(m);
        const std::string path = dir + "/constellation_" + name + ".txt";
        spec.save_table(path);
        std::cout << "wrote " << path << "\n";
    }
}

void gen_puncture(const std::string& dir) {
    std::ofstream f(dir + "/puncture_patterns.txt");
    f << "# Rate matching reference: rate, kept parity fraction of the 2L pool,\n"
      << "# and frozen output lengths for two block lengths. Systematic bits are\n"
      << "# never punctured; each parity stream keeps an evenly spaced share of\n"
      << "# the kept-parity budget; tail bits are punctured for rates above 1/3.\n"
      << "# rate rm_len(40) rm_len(1024)\n";
    for (const char* rt : {"1/3", "1/2", "2/3", "3/4"}) {
        const CodeRate r = parse_rate(rt);
        f << rt << " " << rate_matched_length(40, r) << " " << rate_matched_length(1024, r)
          << "\n";
    }
    std::cout << "wrote " << dir << "/puncture_patterns.txt\n";
}

void gen_mcs(const std::string& dir) {
    const auto table = McsTable::default_table();
    std::ofstream f(dir + "/mcs_default.txt");
    f << "# Default MCS table: min_snr_db m rate label\n"
      << "# Thresholds measured with `resitok mcs-calibrate` (<=10% BLER on\n"
      << "# 1024-bit blocks over AWGN), rounded up to the next 0.5 dB.\n";
    for (const auto& e : table.entries()) {
        if (std::isinf(e.min_snr_db)) {
            f << "-inf";
        } else {
            f << e.min_snr_db;
        }
        f << " " << e.bits_per_symbol << " " << e.code_rate.num << "/" << e.code_rate.den << " "
          << e.label << "\n";
    }
    std::cout << "wrote " << dir << "/mcs_default.txt\n";
}

void gen_trainset(const std::string& dir) {
    const auto data = make_lowrank_patches(64, 4096, 42);
    save_patches(dir + "/trainset.rtpd", data, 4096, 64);
    std::cout << "wrote " << dir << "/trainset.rtpd\n";
}

void gen_codebook(const std::string& dir) {
    // Training samples: retained coefficient groups from synthetic images
    // drawn by the same process as the test corpus (disjoint seeds).
    const DctTokenizerConfig cfg;
    std::vector<double> samples;
    const size_t per_image = cfg.total_tokens;
    const uint32_t images = 64;
    samples.reserve(per_image * cfg.coeffs_per_token * images);
    for (uint32_t i = 0; i < images; ++i) {
        const auto img = synth_image(256, 5000 + i, 0.3);
        const auto groups = extract_groups(img, cfg);
        samples.insert(samples.end(), groups.begin(), groups.end());
    }
    const size_t count = samples.size() / cfg.coeffs_per_token;
    std::cout << "training codebook on " << count << " groups...\n";
    const auto cb = train_codebook(samples, count, cfg.coeffs_per_token, 4096, 7, 60, 1e-6);
    cb.save(dir + "/codebook_k4096_d4.rtcb");
    std::cout << "wrote " << dir << "/codebook_k4096_d4.rtcb\n";
}

}  // namespace

int main(int argc, char** argv) {
    const std::string dir = "data";
    std::filesystem::create_directories(dir);
    const std::string what = argc > 1 ? argv[1] : "all";
    if (what == "all" || what == "corpus") gen_corpus(dir);
    if (what == "all" || what == "qpp") gen_qpp(dir);
    if (what == "all" || what == "constellations") gen_constellations(dir);
    if (what == "all" || what == "puncture") gen_puncture(dir);
    if (what == "all" || what == "mcs") gen_mcs(dir);
    if (what == "all" || what == "trainset") gen_trainset(dir);
    if (what == "all" || what == "codebook") gen_codebook(dir);
    return 0;
}
