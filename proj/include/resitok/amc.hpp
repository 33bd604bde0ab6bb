#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "resitok/fec.hpp"

namespace resitok {

struct McsEntry {
    double min_snr_db = 0.0;  // activation threshold; -inf for the fallback row
    uint32_t bits_per_symbol = 2;
    CodeRate code_rate{1, 3};
    std::string label;

    double spectral_efficiency() const { return bits_per_symbol * code_rate.value(); }
};

// SNR-indexed modulation-and-coding table. Entries sorted by threshold,
// spectral efficiency strictly increasing, first row always feasible.
class McsTable {
public:
    explicit McsTable(std::vector<McsEntry> entries);

    // Highest-throughput entry whose threshold is <= snr_db.
    const McsEntry& select(double snr_db) const;
    const std::vector<McsEntry>& entries() const { return entries_; }

    // Plain text, one row per entry: "min_snr_db m r label", '#' comments,
    // "-inf" accepted for the fallback threshold.
    static McsTable load(const std::string& path);

    // Shipped default. Thresholds were measured with the mcs-calibrate
    // sweep (<=10% BLER on 1024-bit blocks) and rounded up to 0.5 dB.
    static McsTable default_table();

private:
    std::vector<McsEntry> entries_;
};

// CBR = n_symbols / (H * W * 3).
double compute_cbr(uint64_t n_symbols, uint32_t height, uint32_t width);

}  // namespace resitok
