#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "resitok/amc.hpp"
#include "resitok/dct.hpp"
#include "resitok/fec.hpp"
#include "resitok/framing.hpp"
#include "resitok/image.hpp"
#include "resitok/modem.hpp"
#include "resitok/tokenizer.hpp"

namespace resitok {

struct PipelineConfig {
    DctTokenizerConfig tokenizer;
    FrameConfig frame;  // image dims are set per patch internally
    TurboConfig turbo;
    McsTable mcs = McsTable::default_table();
    bool mcs_override = false;  // fixed (m, r) instead of table lookup
    uint32_t override_m = 4;
    CodeRate override_r{1, 2};
    double snr_db = 6.0;
    cplx channel_gain = {1.0, 0.0};

    // Cross-module consistency; run before any transmission.
    void validate(const Codebook& cb) const;
};

struct TransmissionReport {
    double cbr_actual = 0.0;
    double snr_db = 0.0;
    std::string mcs_label;
    uint64_t tokens_sent = 0;
    uint32_t tokens_budget = 0;  // per-patch n_t
    uint64_t info_bits = 0;
    uint64_t coded_bits = 0;
    uint64_t symbols = 0;
    double pre_fec_ber = 0.0;
    double post_fec_ber = 0.0;
    uint64_t token_errors = 0;
    double psnr_db = 0.0;
    double wall_ms = 0.0;
};

// Full chain per 256x256 (configurable) patch: tokenize -> frame -> FEC ->
// modulate -> AWGN -> soft demod -> decode -> zero-pad -> reconstruct.
// Residual decode errors pass tokens through unchanged; only untransmitted
// positions are zero-padded. Images larger than the patch are tiled in
// raster order with an equal per-patch symbol budget; trailing rows/columns
// that do not fill a patch are cropped.
std::pair<ImageBuffer, TransmissionReport> transmit(const ImageBuffer& image,
                                                    const PipelineConfig& cfg, const Codebook& cb,
                                                    uint64_t seed);

enum class SweepAxis { kSnrDb, kCbr };

inline constexpr const char* kSweepSchemaTag = "resitok-sweep-v1";

// One CSV row per grid point, averaged over trials with independently
// derived seeds. Per-point failures are recorded in the status column and
// the sweep continues. Returns the emitted data rows (without header).
std::vector<std::string> sweep(const PipelineConfig& cfg, const Codebook& cb,
                               const ImageBuffer& image, SweepAxis axis,
                               const std::vector<double>& values, uint32_t trials, uint64_t seed,
                               std::ostream& csv);

}  // namespace resitok
