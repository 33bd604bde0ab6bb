#pragma once

#include <cstdint>
#include <vector>

#include "resitok/image.hpp"
#include "resitok/tokenizer.hpp"

namespace resitok {

// Deterministic frequency-ordered block-transform tokenizer. Low-frequency
// coefficient groups become key tokens, higher-frequency groups become
// detail tokens, so truncating the sequence degrades gracefully.
struct DctTokenizerConfig {
    uint32_t patch = 256;            // square patch edge, 3 channels
    uint32_t block = 8;              // transform block size
    uint32_t coeffs_per_token = 4;   // d: coefficients grouped into one VQ vector
    uint32_t total_tokens = 256;     // N
    uint32_t key_count = 32;         // |y_K|

    uint32_t retained_coeffs() const { return total_tokens * coeffs_per_token; }
    void validate() const;
};

// Global coefficient ordering, most important first. Entries are flat
// coefficient indices laid out as ((channel * blocks + block) * block_size^2
// + raster position in block). Sort key: zig-zag frequency ascending, then
// channel (luma first), then block raster order. Length = patch*patch*3;
// the encoder retains the first total_tokens * coeffs_per_token entries.
std::vector<uint32_t> importance_order(const DctTokenizerConfig& cfg);

// Transform-domain latents: forward color decorrelation + blockwise
// orthonormal DCT, then the retained coefficient groups in importance
// order (total_tokens groups of coeffs_per_token each). This is the
// identity-VQ path used by encode_image/decode_image.
std::vector<double> extract_groups(const ImageBuffer& img, const DctTokenizerConfig& cfg);

// Inverse of extract_groups: scatter groups back, zero everything not
// represented, inverse DCT, inverse color transform, clamp to [0,1].
// mask[g] == 0 replaces group g by the all-zeros latent.
ImageBuffer reconstruct_from_groups(const std::vector<double>& groups,
                                    const std::vector<uint8_t>& mask,
                                    const DctTokenizerConfig& cfg);

TokenSequence encode_image(const ImageBuffer& img, const DctTokenizerConfig& cfg,
                           const Codebook& cb);

ImageBuffer decode_image(const TokenSequence& seq, const DctTokenizerConfig& cfg,
                         const Codebook& cb);

}  // namespace resitok
