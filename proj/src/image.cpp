#include "resitok/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "resitok/errors.hpp"

namespace resitok {

ImageBuffer make_image(uint32_t height, uint32_t width, double fill) {
    ImageBuffer img;
    img.height = height;
    img.width = width;
    img.data.assign(static_cast<size_t>(height) * width * 3, fill);
    return img;
}

namespace {

uint8_t to_byte(double v) {
    const double scaled = std::clamp(v, 0.0, 1.0) * 255.0;
    return static_cast<uint8_t>(std::lround(scaled));
}

// Reads one whitespace-delimited PPM header token, skipping '#' comments.
std::string next_ppm_token(std::istream& f, const std::string& path) {
    std::string tok;
    int ch;
    while ((ch = f.get()) != EOF) {
        if (ch == '#') {
            while ((ch = f.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    if (tok.empty()) {
        throw IoError("truncated PPM header in " + path + " at byte " +
                      std::to_string(f.tellg() == std::streampos(-1) ? 0 : long(f.tellg())));
    }
    return tok;
}

}  // namespace

ImageBuffer load_ppm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    if (next_ppm_token(f, path) != "P6") {
        throw IoError("not a binary PPM (P6): " + path + " at byte 0");
    }
    uint32_t w = 0, h = 0, maxval = 0;
    try {
        w = static_cast<uint32_t>(std::stoul(next_ppm_token(f, path)));
        h = static_cast<uint32_t>(std::stoul(next_ppm_token(f, path)));
        maxval = static_cast<uint32_t>(std::stoul(next_ppm_token(f, path)));
    } catch (const std::exception&) {
        throw IoError("bad PPM header field in " + path + " at byte " + std::to_string(long(f.tellg())));
    }
    if (maxval != 255) throw IoError("unsupported PPM maxval (want 255): " + path);
    if (w == 0 || h == 0) throw IoError("zero PPM dimensions: " + path);

    std::vector<uint8_t> raw(static_cast<size_t>(w) * h * 3);
    f.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<size_t>(f.gcount()) != raw.size()) {
        throw IoError("truncated PPM pixel data in " + path + " at byte " +
                      std::to_string(long(f.tellg())));
    }
    ImageBuffer img = make_image(h, w);
    for (size_t i = 0; i < raw.size(); ++i) img.data[i] = raw[i] / 255.0;
    return img;
}

void save_ppm(const ImageBuffer& img, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << "P6\n" << img.width << " " << img.height << "\n255\n";
    std::vector<uint8_t> raw(img.data.size());
    for (size_t i = 0; i < raw.size(); ++i) raw[i] = to_byte(img.data[i]);
    f.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!f) throw IoError("write failed: " + path);
}

ImageBuffer load_png(const std::string& path) {
    FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw IoError("cannot open: " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw IoError("libpng init failed: " + path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw IoError("PNG decode failed: " + path);
    }
    png_init_io(png, fp);
    png_read_info(png, info);

    png_set_strip_16(png);
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY ||
        png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_set_gray_to_rgb(png);
    }
    png_read_update_info(png, info);

    const uint32_t w = png_get_image_width(png, info);
    const uint32_t h = png_get_image_height(png, info);
    std::vector<uint8_t> raw(static_cast<size_t>(w) * h * 3);
    std::vector<png_bytep> rows(h);
    for (uint32_t y = 0; y < h; ++y) rows[y] = raw.data() + static_cast<size_t>(y) * w * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);

    ImageBuffer img = make_image(h, w);
    for (size_t i = 0; i < raw.size(); ++i) img.data[i] = raw[i] / 255.0;
    return img;
}

void save_png(const ImageBuffer& img, const std::string& path) {
    FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw IoError("cannot open for writing: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw IoError("libpng init failed: " + path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw IoError("PNG encode failed: " + path);
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<uint8_t> raw(img.data.size());
    for (size_t i = 0; i < raw.size(); ++i) raw[i] = to_byte(img.data[i]);
    std::vector<png_bytep> rows(img.height);
    for (uint32_t y = 0; y < img.height; ++y) {
        rows[y] = raw.data() + static_cast<size_t>(y) * img.width * 3;
    }
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

namespace {

bool has_suffix(const std::string& s, const std::string& suffix) {
    if (s.size() < suffix.size()) return false;
    std::string tail = s.substr(s.size() - suffix.size());
    std::transform(tail.begin(), tail.end(), tail.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return tail == suffix;
}

}  // namespace

ImageBuffer load_image(const std::string& path) {
    if (has_suffix(path, ".png")) return load_png(path);
    if (has_suffix(path, ".ppm")) return load_ppm(path);
    throw ArgumentError("unsupported image extension (expect .ppm or .png): " + path);
}

void save_image(const ImageBuffer& img, const std::string& path) {
    if (has_suffix(path, ".png")) {
        save_png(img, path);
    } else if (has_suffix(path, ".ppm")) {
        save_ppm(img, path);
    } else {
        throw ArgumentError("unsupported image extension (expect .ppm or .png): " + path);
    }
}

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
    if (a.height != b.height || a.width != b.width) {
        throw ArgumentError("psnr: dimension mismatch");
    }
    double mse = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        const double diff = a.data[i] - b.data[i];
        mse += diff * diff;
    }
    mse /= static_cast<double>(a.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

}  // namespace resitok
