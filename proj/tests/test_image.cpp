#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "resitok/errors.hpp"
#include "resitok/image.hpp"
#include "resitok/rng.hpp"

using namespace resitok;

namespace {

ImageBuffer random_8bit_image(uint32_t h, uint32_t w, uint64_t seed) {
    ImageBuffer img = make_image(h, w);
    Rng rng(seed);
    for (auto& v : img.data) v = static_cast<double>(rng.uniform_int(256)) / 255.0;
    return img;
}

}  // namespace

TEST_CASE("psnr sentinel and trivial values") {
    const ImageBuffer a = make_image(4, 4, 0.0);
    const ImageBuffer ones = make_image(4, 4, 1.0);
    CHECK(std::isinf(psnr(a, a)));
    CHECK(psnr(a, ones) == doctest::Approx(0.0));

    // Checkerboard vs inverted checkerboard at amplitude 0.5: MSE = 0.25.
    ImageBuffer c1 = make_image(4, 4), c2 = make_image(4, 4);
    for (uint32_t y = 0; y < 4; ++y) {
        for (uint32_t x = 0; x < 4; ++x) {
            const double v = ((x + y) % 2) ? 0.75 : 0.25;
            for (uint32_t c = 0; c < 3; ++c) {
                c1.at(y, x, c) = v;
                c2.at(y, x, c) = 1.0 - v;
            }
        }
    }
    CHECK(psnr(c1, c2) == doctest::Approx(10.0 * std::log10(1.0 / 0.25)).epsilon(1e-9));

    const ImageBuffer other = make_image(4, 5);
    CHECK_THROWS_AS(psnr(a, other), ArgumentError);
}

TEST_CASE("ppm header round trip and sample scaling") {
    ImageBuffer img = make_image(1, 2);
    img.at(0, 0, 0) = 1.0;  // 255
    img.at(0, 1, 2) = 0.0;  // 0
    const std::string path = "build/test_2x1.ppm";
    save_ppm(img, path);
    const ImageBuffer back = load_ppm(path);
    REQUIRE(back.height == 1);
    REQUIRE(back.width == 2);
    CHECK(back.at(0, 0, 0) == 1.0);
    CHECK(back.at(0, 1, 2) == 0.0);
    std::remove(path.c_str());
}

TEST_CASE("ppm save/load identity on a random 8-bit image") {
    const ImageBuffer img = random_8bit_image(16, 24, 7);
    const std::string path = "build/test_rand.ppm";
    save_ppm(img, path);
    const ImageBuffer back = load_ppm(path);
    REQUIRE(back.data.size() == img.data.size());
    for (size_t i = 0; i < img.data.size(); ++i) CHECK(back.data[i] == img.data[i]);
    std::remove(path.c_str());
}

TEST_CASE("png save/load identity on a random 8-bit image") {
    const ImageBuffer img = random_8bit_image(20, 15, 9);
    const std::string path = "build/test_rand.png";
    save_png(img, path);
    const ImageBuffer back = load_png(path);
    REQUIRE(back.height == img.height);
    REQUIRE(back.width == img.width);
    for (size_t i = 0; i < img.data.size(); ++i) CHECK(back.data[i] == img.data[i]);
    std::remove(path.c_str());
}

TEST_CASE("load_image dispatches on extension") {
    const ImageBuffer img = random_8bit_image(8, 8, 13);
    save_image(img, "build/test_ext.ppm");
    save_image(img, "build/test_ext.png");
    CHECK(load_image("build/test_ext.ppm").data == img.data);
    CHECK(load_image("build/test_ext.png").data == img.data);
    CHECK_THROWS_AS(load_image("build/test_ext.bmp"), ArgumentError);
    std::remove("build/test_ext.ppm");
    std::remove("build/test_ext.png");
}

TEST_CASE("malformed ppm reports a parse error") {
    const std::string path = "build/test_bad.ppm";
    {
        std::ofstream f(path, std::ios::binary);
        f << "P6\n2 1\n255\n\xFF";  // truncated pixel data
    }
    CHECK_THROWS_AS(load_ppm(path), IoError);
    {
        std::ofstream f(path, std::ios::binary);
        f << "P5\n2 1\n255\n";  // wrong magic
    }
    CHECK_THROWS_AS(load_ppm(path), IoError);
    CHECK_THROWS_AS(load_ppm("build/nonexistent.ppm"), IoError);
    std::remove(path.c_str());
}
