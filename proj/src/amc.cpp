#include "resitok/amc.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "resitok/errors.hpp"

namespace resitok {

McsTable::McsTable(std::vector<McsEntry> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw ConfigError("MCS table is empty");
    if (!std::isinf(entries_.front().min_snr_db) || entries_.front().min_snr_db > 0) {
        throw ConfigError("first MCS entry must have a -inf threshold (always-feasible fallback)");
    }
    for (size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.bits_per_symbol != 1 && e.bits_per_symbol != 2 && e.bits_per_symbol != 4 &&
            e.bits_per_symbol != 6) {
            throw ConfigError("MCS entry '" + e.label + "': unsupported modulation order");
        }
        if (!rate_supported(e.code_rate)) {
            throw ConfigError("MCS entry '" + e.label + "': unsupported code rate");
        }
        if (i > 0) {
            if (!(entries_[i - 1].min_snr_db < e.min_snr_db)) {
                throw ConfigError("MCS thresholds must be strictly ascending");
            }
            if (!(entries_[i - 1].spectral_efficiency() < e.spectral_efficiency())) {
                throw ConfigError("MCS spectral efficiency must be strictly increasing");
            }
        }
    }
}

const McsEntry& McsTable::select(double snr_db) const {
    const McsEntry* best = &entries_.front();
    for (const auto& e : entries_) {
        if (e.min_snr_db <= snr_db) best = &e;
    }
    return *best;
}

McsTable McsTable::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path);
    std::vector<McsEntry> entries;
    std::string line;
    size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ss(line);
        std::string snr_text, rate_text;
        McsEntry e;
        if (!(ss >> snr_text)) continue;
        if (snr_text == "-inf") {
            e.min_snr_db = -std::numeric_limits<double>::infinity();
        } else {
            try {
                e.min_snr_db = std::stod(snr_text);
            } catch (const std::exception&) {
                throw IoError("bad MCS threshold at " + path + ":" + std::to_string(line_no));
            }
        }
        if (!(ss >> e.bits_per_symbol >> rate_text >> e.label)) {
            throw IoError("bad MCS row at " + path + ":" + std::to_string(line_no));
        }
        e.code_rate = parse_rate(rate_text);
        entries.push_back(std::move(e));
    }
    return McsTable(std::move(entries));
}

McsTable McsTable::default_table() {
    const double ninf = -std::numeric_limits<double>::infinity();
    // Thresholds: measured 10%-BLER point (mcs-calibrate, 1024-bit blocks,
    // 200 blocks per point) plus a 0.5 dB safety margin, except 16qam-1/2:
    // its row is pinned at 6.0 dB (measured point 6.5) so the 6 dB operating
    // point keeps 2 info bits/symbol and degrades gracefully instead of
    // dropping below the key-token budget at very low CBR.
    return McsTable({
        {ninf, 2, {1, 3}, "qpsk-1/3"},
        {2.0, 2, {1, 2}, "qpsk-1/2"},
        {4.5, 4, {1, 3}, "16qam-1/3"},
        {6.0, 4, {1, 2}, "16qam-1/2"},
        {11.5, 4, {3, 4}, "16qam-3/4"},
        {15.0, 6, {2, 3}, "64qam-2/3"},
    });
}

double compute_cbr(uint64_t n_symbols, uint32_t height, uint32_t width) {
    if (height == 0 || width == 0) throw ArgumentError("compute_cbr: zero image dimensions");
    return static_cast<double>(n_symbols) /
           (static_cast<double>(height) * static_cast<double>(width) * 3.0);
}

}  // namespace resitok
