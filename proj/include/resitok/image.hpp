#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace resitok {

// H x W x 3 interleaved RGB, samples in [0,1].
struct ImageBuffer {
    uint32_t height = 0;
    uint32_t width = 0;
    std::vector<double> data;  // size H*W*3, row-major, RGB interleaved

    double& at(uint32_t y, uint32_t x, uint32_t c) {
        return data[(static_cast<size_t>(y) * width + x) * 3 + c];
    }
    double at(uint32_t y, uint32_t x, uint32_t c) const {
        return data[(static_cast<size_t>(y) * width + x) * 3 + c];
    }
};

ImageBuffer make_image(uint32_t height, uint32_t width, double fill = 0.0);

// Binary PPM (P6, 8-bit), bit-exact native support. 8-bit samples map to
// [0,1] by /255. Parse errors report the byte offset.
ImageBuffer load_ppm(const std::string& path);
void save_ppm(const ImageBuffer& img, const std::string& path);

// PNG via libpng (8-bit RGB; grayscale/alpha inputs are expanded).
ImageBuffer load_png(const std::string& path);
void save_png(const ImageBuffer& img, const std::string& path);

// Dispatch on extension (.ppm / .png).
ImageBuffer load_image(const std::string& path);
void save_image(const ImageBuffer& img, const std::string& path);

// 10*log10(1/MSE) for samples in [0,1]; +infinity for identical images.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

}  // namespace resitok
