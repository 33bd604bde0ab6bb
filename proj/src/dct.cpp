#include "resitok/dct.hpp"

#include <algorithm>
#include <cmath>

#include "resitok/errors.hpp"

namespace resitok {

namespace {

// Fixed RGB -> (Y-0.5, Cb, Cr) decorrelation. Luma is centered so an
// all-zero coefficient plane decodes to mid-gray; chroma is naturally
// centered at zero.
//   Y  = 0.299 R + 0.587 G + 0.114 B
//   Cb = 0.564 (B - Y)
//   Cr = 0.713 (R - Y)
void rgb_to_planes(const ImageBuffer& img, std::vector<double>* planes) {
    const size_t n = static_cast<size_t>(img.height) * img.width;
    for (size_t i = 0; i < n; ++i) {
        const double r = img.data[i * 3 + 0];
        const double g = img.data[i * 3 + 1];
        const double b = img.data[i * 3 + 2];
        const double y = 0.299 * r + 0.587 * g + 0.114 * b;
        planes[0][i] = y - 0.5;
        planes[1][i] = 0.564 * (b - y);
        planes[2][i] = 0.713 * (r - y);
    }
}

ImageBuffer planes_to_rgb(const std::vector<double>* planes, uint32_t height, uint32_t width) {
    ImageBuffer img = make_image(height, width);
    const size_t n = static_cast<size_t>(height) * width;
    for (size_t i = 0; i < n; ++i) {
        const double y = planes[0][i] + 0.5;
        const double b = planes[1][i] / 0.564 + y;
        const double r = planes[2][i] / 0.713 + y;
        const double g = (y - 0.299 * r - 0.114 * b) / 0.587;
        img.data[i * 3 + 0] = std::clamp(r, 0.0, 1.0);
        img.data[i * 3 + 1] = std::clamp(g, 0.0, 1.0);
        img.data[i * 3 + 2] = std::clamp(b, 0.0, 1.0);
    }
    return img;
}

// Orthonormal DCT-II basis matrix, b x b.
std::vector<double> dct_matrix(uint32_t b) {
    std::vector<double> t(static_cast<size_t>(b) * b);
    const double pi = 3.14159265358979323846;
    for (uint32_t k = 0; k < b; ++k) {
        const double scale = (k == 0) ? std::sqrt(1.0 / b) : std::sqrt(2.0 / b);
        for (uint32_t n = 0; n < b; ++n) {
            t[static_cast<size_t>(k) * b + n] = scale * std::cos(pi * (2.0 * n + 1.0) * k / (2.0 * b));
        }
    }
    return t;
}

// F = T X T^t (forward) or X = T^t F T (inverse), b x b blocks.
void transform_block(const double* in, double* out, const std::vector<double>& t, uint32_t b,
                     bool forward) {
    std::vector<double> tmp(static_cast<size_t>(b) * b, 0.0);
    // tmp = M1 * in, where M1 = T (forward) or T^t (inverse)
    for (uint32_t i = 0; i < b; ++i) {
        for (uint32_t j = 0; j < b; ++j) {
            double acc = 0.0;
            for (uint32_t k = 0; k < b; ++k) {
                const double m = forward ? t[static_cast<size_t>(i) * b + k]
                                         : t[static_cast<size_t>(k) * b + i];
                acc += m * in[static_cast<size_t>(k) * b + j];
            }
            tmp[static_cast<size_t>(i) * b + j] = acc;
        }
    }
    // out = tmp * M2, where M2 = T^t (forward) or T (inverse)
    for (uint32_t i = 0; i < b; ++i) {
        for (uint32_t j = 0; j < b; ++j) {
            double acc = 0.0;
            for (uint32_t k = 0; k < b; ++k) {
                const double m = forward ? t[static_cast<size_t>(j) * b + k]
                                         : t[static_cast<size_t>(k) * b + j];
                acc += tmp[static_cast<size_t>(i) * b + k] * m;
            }
            out[static_cast<size_t>(i) * b + j] = acc;
        }
    }
}

// Zig-zag traversal of a b x b block; returns raster positions in zig-zag
// order.
std::vector<uint32_t> zigzag_order(uint32_t b) {
    std::vector<uint32_t> order;
    order.reserve(static_cast<size_t>(b) * b);
    for (uint32_t s = 0; s <= 2 * (b - 1); ++s) {
        if (s % 2 == 0) {
            // up-right: start from the lowest row on this anti-diagonal
            for (int32_t r = static_cast<int32_t>(std::min(s, b - 1));
                 r >= 0 && s - static_cast<uint32_t>(r) < b; --r) {
                order.push_back(static_cast<uint32_t>(r) * b + (s - static_cast<uint32_t>(r)));
            }
        } else {
            for (int32_t c = static_cast<int32_t>(std::min(s, b - 1));
                 c >= 0 && s - static_cast<uint32_t>(c) < b; --c) {
                order.push_back((s - static_cast<uint32_t>(c)) * b + static_cast<uint32_t>(c));
            }
        }
    }
    return order;
}

// Blockwise forward/inverse DCT over one plane laid out as
// block-major coefficient storage: coeff[block * b*b + raster_in_block].
void plane_dct(const std::vector<double>& plane, std::vector<double>* coeffs, uint32_t patch,
               uint32_t b, const std::vector<double>& t) {
    const uint32_t nb = patch / b;
    std::vector<double> in(static_cast<size_t>(b) * b);
    for (uint32_t by = 0; by < nb; ++by) {
        for (uint32_t bx = 0; bx < nb; ++bx) {
            for (uint32_t y = 0; y < b; ++y) {
                for (uint32_t x = 0; x < b; ++x) {
                    in[static_cast<size_t>(y) * b + x] =
                        plane[(static_cast<size_t>(by) * b + y) * patch + bx * b + x];
                }
            }
            const size_t block_idx = static_cast<size_t>(by) * nb + bx;
            transform_block(in.data(), coeffs->data() + block_idx * b * b, t, b, true);
        }
    }
}

void plane_idct(const std::vector<double>& coeffs, std::vector<double>* plane, uint32_t patch,
                uint32_t b, const std::vector<double>& t) {
    const uint32_t nb = patch / b;
    std::vector<double> out(static_cast<size_t>(b) * b);
    for (uint32_t by = 0; by < nb; ++by) {
        for (uint32_t bx = 0; bx < nb; ++bx) {
            const size_t block_idx = static_cast<size_t>(by) * nb + bx;
            transform_block(coeffs.data() + block_idx * b * b, out.data(), t, b, false);
            for (uint32_t y = 0; y < b; ++y) {
                for (uint32_t x = 0; x < b; ++x) {
                    (*plane)[(static_cast<size_t>(by) * b + y) * patch + bx * b + x] =
                        out[static_cast<size_t>(y) * b + x];
                }
            }
        }
    }
}

}  // namespace

void DctTokenizerConfig::validate() const {
    if (patch == 0 || block == 0 || patch % block != 0) {
        throw ConfigError("patch must be a nonzero multiple of block size");
    }
    if (coeffs_per_token == 0 || total_tokens == 0) {
        throw ConfigError("token geometry must be nonzero");
    }
    if (key_count >= total_tokens) {
        throw ConfigError("key_count must be less than total_tokens");
    }
    const uint64_t available = static_cast<uint64_t>(patch) * patch * 3;
    if (static_cast<uint64_t>(retained_coeffs()) > available) {
        throw ConfigError("retained coefficients exceed patch coefficient count");
    }
}

std::vector<uint32_t> importance_order(const DctTokenizerConfig& cfg) {
    cfg.validate();
    const uint32_t b = cfg.block;
    const uint32_t nb = cfg.patch / b;
    const uint32_t num_blocks = nb * nb;
    const uint32_t bb = b * b;
    const std::vector<uint32_t> zz = zigzag_order(b);

    std::vector<uint32_t> order;
    order.reserve(static_cast<size_t>(num_blocks) * bb * 3);
    for (uint32_t z = 0; z < bb; ++z) {
        for (uint32_t ch = 0; ch < 3; ++ch) {  // channel 0 is the luma proxy
            for (uint32_t blk = 0; blk < num_blocks; ++blk) {
                order.push_back((ch * num_blocks + blk) * bb + zz[z]);
            }
        }
    }
    return order;
}

std::vector<double> extract_groups(const ImageBuffer& img, const DctTokenizerConfig& cfg) {
    cfg.validate();
    if (img.height != cfg.patch || img.width != cfg.patch) {
        throw ArgumentError("extract_groups: image does not match patch size");
    }
    const size_t plane_size = static_cast<size_t>(cfg.patch) * cfg.patch;
    std::vector<double> planes[3] = {std::vector<double>(plane_size),
                                     std::vector<double>(plane_size),
                                     std::vector<double>(plane_size)};
    rgb_to_planes(img, planes);

    const auto t = dct_matrix(cfg.block);
    std::vector<double> coeffs(plane_size * 3);
    for (uint32_t ch = 0; ch < 3; ++ch) {
        std::vector<double> plane_coeffs(plane_size);
        plane_dct(planes[ch], &plane_coeffs, cfg.patch, cfg.block, t);
        std::copy(plane_coeffs.begin(), plane_coeffs.end(), coeffs.begin() + ch * plane_size);
    }

    const auto order = importance_order(cfg);
    std::vector<double> groups(cfg.retained_coeffs());
    for (size_t i = 0; i < groups.size(); ++i) groups[i] = coeffs[order[i]];
    return groups;
}

ImageBuffer reconstruct_from_groups(const std::vector<double>& groups,
                                    const std::vector<uint8_t>& mask,
                                    const DctTokenizerConfig& cfg) {
    cfg.validate();
    if (groups.size() != cfg.retained_coeffs()) {
        throw ArgumentError("reconstruct_from_groups: group buffer size mismatch");
    }
    if (mask.size() != cfg.total_tokens) {
        throw ArgumentError("reconstruct_from_groups: mask length mismatch");
    }
    const size_t plane_size = static_cast<size_t>(cfg.patch) * cfg.patch;
    std::vector<double> coeffs(plane_size * 3, 0.0);
    const auto order = importance_order(cfg);
    const uint32_t d = cfg.coeffs_per_token;
    for (uint32_t g = 0; g < cfg.total_tokens; ++g) {
        if (!mask[g]) continue;  // masked groups stay at the zero latent
        for (uint32_t j = 0; j < d; ++j) {
            coeffs[order[static_cast<size_t>(g) * d + j]] = groups[static_cast<size_t>(g) * d + j];
        }
    }

    const auto t = dct_matrix(cfg.block);
    std::vector<double> planes[3] = {std::vector<double>(plane_size),
                                     std::vector<double>(plane_size),
                                     std::vector<double>(plane_size)};
    for (uint32_t ch = 0; ch < 3; ++ch) {
        std::vector<double> plane_coeffs(coeffs.begin() + ch * plane_size,
                                         coeffs.begin() + (ch + 1) * plane_size);
        plane_idct(plane_coeffs, &planes[ch], cfg.patch, cfg.block, t);
    }
    return planes_to_rgb(planes, cfg.patch, cfg.patch);
}

TokenSequence encode_image(const ImageBuffer& img, const DctTokenizerConfig& cfg,
                           const Codebook& cb) {
    if (cb.dim() != cfg.coeffs_per_token) {
        throw ArgumentError("encode_image: codebook dimension mismatch");
    }
    const auto groups = extract_groups(img, cfg);
    TokenSequence seq;
    seq.key_count = cfg.key_count;
    seq.indices.resize(cfg.total_tokens);
    seq.received_mask.assign(cfg.total_tokens, 1);
    const uint32_t d = cfg.coeffs_per_token;
    for (uint32_t g = 0; g < cfg.total_tokens; ++g) {
        seq.indices[g] = quantize({groups.data() + static_cast<size_t>(g) * d, d}, cb);
    }
    return seq;
}

ImageBuffer decode_image(const TokenSequence& seq, const DctTokenizerConfig& cfg,
                         const Codebook& cb) {
    if (seq.total() != cfg.total_tokens) {
        throw ArgumentError("decode_image: token sequence length mismatch");
    }
    if (cb.dim() != cfg.coeffs_per_token) {
        throw ArgumentError("decode_image: codebook dimension mismatch");
    }
    const uint32_t d = cfg.coeffs_per_token;
    std::vector<double> groups(cfg.retained_coeffs(), 0.0);
    for (uint32_t g = 0; g < cfg.total_tokens; ++g) {
        if (!seq.received_mask[g]) continue;
        const auto cw = cb.codeword(seq.indices[g]);
        for (uint32_t j = 0; j < d; ++j) groups[static_cast<size_t>(g) * d + j] = cw[j];
    }
    return reconstruct_from_groups(groups, seq.received_mask, cfg);
}

}  // namespace resitok
