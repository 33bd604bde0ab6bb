#include "resitok/modem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "resitok/errors.hpp"

namespace resitok {

namespace {

// Gray code over one axis: amplitude levels -(L-1), ..., +(L-1) in steps of
// 2, labeled so adjacent levels differ in one bit and the all-zeros label
// sits on the most positive level.
int axis_level(uint32_t label_bits, uint32_t bits) {
    // binary-reflected Gray decode, then map rank -> amplitude
    uint32_t gray = label_bits;
    uint32_t bin = gray;
    for (uint32_t shift = 1; shift < bits; shift <<= 1) bin ^= bin >> shift;
    const uint32_t levels = 1u << bits;
    // bin counts down from the top level so label 0...0 -> +(levels-1)
    return static_cast<int>(levels - 1 - 2 * bin);
}

}  // namespace

ConstellationSpec ConstellationSpec::make(uint32_t m) {
    if (m != 1 && m != 2 && m != 4 && m != 6) {
        throw ConfigError("unsupported modulation order m=" + std::to_string(m));
    }
    ConstellationSpec spec;
    spec.bits_per_symbol = m;
    const uint32_t count = 1u << m;
    spec.points.resize(count);
    if (m == 1) {
        spec.points[0] = {1.0, 0.0};
        spec.points[1] = {-1.0, 0.0};
        return spec;
    }
    const uint32_t half = m / 2;
    // Average energy of one axis: mean of level^2 over 2^half Gray levels.
    double axis_energy = 0.0;
    for (uint32_t v = 0; v < (1u << half); ++v) {
        const double lvl = axis_level(v, half);
        axis_energy += lvl * lvl;
    }
    axis_energy /= static_cast<double>(1u << half);
    const double norm = 1.0 / std::sqrt(2.0 * axis_energy);
    for (uint32_t label = 0; label < count; ++label) {
        const uint32_t i_bits = label >> half;          // first m/2 bits (MSB side)
        const uint32_t q_bits = label & ((1u << half) - 1);
        spec.points[label] = {axis_level(i_bits, half) * norm, axis_level(q_bits, half) * norm};
    }
    return spec;
}

void ConstellationSpec::save_table(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << "# label I Q (m=" << bits_per_symbol << ", unit average energy)\n";
    f.precision(17);
    for (size_t label = 0; label < points.size(); ++label) {
        f << label << " " << points[label].real() << " " << points[label].imag() << "\n";
    }
    if (!f) throw IoError("write failed: " + path);
}

ConstellationSpec ConstellationSpec::load_table(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path);
    ConstellationSpec spec;
    std::vector<cplx> pts;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        size_t label;
        double re, im;
        if (!(ss >> label >> re >> im)) throw IoError("bad constellation row in " + path);
        if (label != pts.size()) throw IoError("out-of-order constellation label in " + path);
        pts.emplace_back(re, im);
    }
    uint32_t m = 0;
    while ((1u << m) < pts.size()) ++m;
    if (pts.empty() || (1u << m) != pts.size()) {
        throw IoError("constellation size is not a power of two in " + path);
    }
    spec.bits_per_symbol = m;
    spec.points = std::move(pts);
    return spec;
}

bool ChannelParams::noiseless() const { return std::isinf(snr_db) && snr_db > 0; }

double ChannelParams::noise_variance() const {
    if (noiseless()) return 0.0;
    return std::pow(10.0, -snr_db / 10.0);
}

std::vector<cplx> modulate(const std::vector<uint8_t>& bits, const ConstellationSpec& spec) {
    const uint32_t m = spec.bits_per_symbol;
    if (bits.size() % m != 0) throw ArgumentError("modulate: bit count not a multiple of m");
    std::vector<cplx> out;
    out.reserve(bits.size() / m);
    for (size_t i = 0; i < bits.size(); i += m) {
        uint32_t label = 0;
        for (uint32_t j = 0; j < m; ++j) label = (label << 1) | (bits[i + j] & 1u);
        out.push_back(spec.points[label]);
    }
    return out;
}

std::vector<cplx> awgn_channel(const std::vector<cplx>& symbols, const ChannelParams& params) {
    std::vector<cplx> out(symbols.size());
    if (params.noiseless()) {
        for (size_t i = 0; i < symbols.size(); ++i) out[i] = params.h * symbols[i];
        return out;
    }
    Rng rng(params.seed);
    const double sigma_axis = std::sqrt(params.noise_variance() / 2.0);
    for (size_t i = 0; i < symbols.size(); ++i) {
        const cplx n(sigma_axis * rng.gaussian(), sigma_axis * rng.gaussian());
        out[i] = params.h * symbols[i] + n;
    }
    return out;
}

LlrVector demodulate_soft(const std::vector<cplx>& received, const ConstellationSpec& spec,
                          const ChannelParams& params) {
    const double sigma2 = params.noiseless() ? 0.0 : params.noise_variance();
    if (!params.noiseless() && sigma2 <= 0.0) {
        throw ArgumentError("demodulate_soft: noise variance must be positive");
    }
    const uint32_t m = spec.bits_per_symbol;
    LlrVector llrs;
    llrs.reserve(received.size() * m);
    std::vector<double> dist(spec.points.size());
    for (const cplx& r : received) {
        for (size_t label = 0; label < spec.points.size(); ++label) {
            dist[label] = std::norm(r - params.h * spec.points[label]);
        }
        for (uint32_t b = 0; b < m; ++b) {
            const uint32_t bit_mask = 1u << (m - 1 - b);  // MSB-first
            double min0 = std::numeric_limits<double>::infinity();
            double min1 = std::numeric_limits<double>::infinity();
            for (size_t label = 0; label < spec.points.size(); ++label) {
                if (label & bit_mask) {
                    min1 = std::min(min1, dist[label]);
                } else {
                    min0 = std::min(min0, dist[label]);
                }
            }
            double llr;
            if (params.noiseless()) {
                llr = (min1 > min0) ? kLlrClamp : ((min1 < min0) ? -kLlrClamp : 0.0);
            } else {
                llr = (min1 - min0) / sigma2;
            }
            llrs.push_back(std::clamp(llr, -kLlrClamp, kLlrClamp));
        }
    }
    return llrs;
}

std::vector<uint8_t> demodulate_hard(const std::vector<cplx>& received,
                                     const ConstellationSpec& spec, const cplx& h) {
    const uint32_t m = spec.bits_per_symbol;
    std::vector<uint8_t> bits;
    bits.reserve(received.size() * m);
    for (const cplx& r : received) {
        double best = std::numeric_limits<double>::infinity();
        uint32_t best_label = 0;
        for (size_t label = 0; label < spec.points.size(); ++label) {
            const double d = std::norm(r - h * spec.points[label]);
            if (d < best) {
                best = d;
                best_label = static_cast<uint32_t>(label);
            }
        }
        for (uint32_t b = 0; b < m; ++b) {
            bits.push_back(static_cast<uint8_t>((best_label >> (m - 1 - b)) & 1u));
        }
    }
    return bits;
}

}  // namespace resitok
