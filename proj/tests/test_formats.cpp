#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "axmul/nn/base64.hpp"
#include "axmul/nn/idx.hpp"
#include "axmul/nn/image.hpp"
#include "support.hpp"

using namespace axmul;
using namespace axmul::nn;

namespace {

GrayImage random_image(std::size_t w, std::size_t h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    GrayImage img{w, h, {}};
    for (std::size_t i = 0; i < w * h; ++i) img.pixels.push_back(std::uint8_t(rng() & 0xFF));
    return img;
}

/// Window-by-window SSIM with an explicit normalized 11x11 Gaussian.
double brute_force_ssim(const GrayImage& a, const GrayImage& b) {
    double g[11][11], total = 0;
    for (int i = 0; i < 11; ++i)
        for (int j = 0; j < 11; ++j) total += g[i][j] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / (2 * 1.5 * 1.5));
    const double c1 = std::pow(0.01 * 255, 2), c2 = std::pow(0.03 * 255, 2);
    double sum = 0;
    std::size_t windows = 0;
    for (std::size_t y = 0; y + 11 <= a.height; ++y) {
        for (std::size_t x = 0; x + 11 <= a.width; ++x) {
            double mx = 0, my = 0;
            for (int i = 0; i < 11; ++i)
                for (int j = 0; j < 11; ++j) {
                    mx += g[i][j] / total * a.at(x + j, y + i);
                    my += g[i][j] / total * b.at(x + j, y + i);
                }
            double vx = 0, vy = 0, cov = 0;
            for (int i = 0; i < 11; ++i)
                for (int j = 0; j < 11; ++j) {
                    const double dx = a.at(x + j, y + i) - mx, dy = b.at(x + j, y + i) - my;
                    vx += g[i][j] / total * dx * dx;
                    vy += g[i][j] / total * dy * dy;
                    cov += g[i][j] / total * dx * dy;
                }
            sum += (2 * mx * my + c1) * (2 * cov + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++windows;
        }
    }
    return sum / double(windows);
}

}  // namespace

TEST_SUITE("formats") {

TEST_CASE("base64 known vectors") {
    auto enc = [](std::string_view s) {
        return base64_encode(std::vector<std::uint8_t>(s.begin(), s.end()));
    };
    CHECK(enc("") == "");
    CHECK(enc("f") == "Zg==");
    CHECK(enc("fo") == "Zm8=");
    CHECK(enc("foo") == "Zm9v");
    CHECK(enc("foobar") == "Zm9vYmFy");
    const auto d = base64_decode("Zm9vYg==");
    CHECK(std::string(d.begin(), d.end()) == "foob");
    std::vector<std::uint8_t> all(256);
    for (int i = 0; i < 256; ++i) all[i] = std::uint8_t(i);
    CHECK(base64_decode(base64_encode(all)) == all);
    for (const char* bad : {"Zm9", "Zm9v!A==", "Z===", "Zg=a"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(base64_decode(bad), std::invalid_argument);
    }
}

TEST_CASE("pgm round trip and parsing") {
    const auto img = random_image(7, 5, 1);
    const auto bytes = encode_pgm(img);
    CHECK(bytes.rfind("P5\n7 5\n255\n", 0) == 0);
    const auto back = parse_pgm(bytes);
    CHECK(back.width == 7);
    CHECK(back.height == 5);
    CHECK(back.pixels == img.pixels);
    const auto commented = parse_pgm("P5\n# note\n2 1\n# more\n255\n" + std::string("\x01\xff", 2));
    CHECK(commented.pixels == std::vector<std::uint8_t>{1, 255});
    CHECK_THROWS_AS(parse_pgm("P2\n1 1\n255\n1"), ImageError);
    CHECK_THROWS_AS(parse_pgm("P5\n2 2\n255\nab"), ImageError);
    CHECK_THROWS_AS(parse_pgm("P5\n1 1\n65535\nab"), ImageError);

    testing::TempDir dir("pgm");
    write_pgm(img, dir.file("x.pgm"));
    CHECK(read_pgm(dir.file("x.pgm")).pixels == img.pixels);
    CHECK_THROWS_AS(read_pgm(dir.file("missing.pgm")), ImageError);
}

TEST_CASE("idx round trip and errors") {
    IdxImages imgs{3, 2, 2, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}};
    const auto parsed = parse_idx_images(encode_idx_images(imgs));
    CHECK(parsed.count == 3);
    CHECK(parsed.rows == 2);
    CHECK(parsed.pixels == imgs.pixels);
    CHECK(parsed.image(1)[0] == 5);
    const std::vector<std::uint8_t> labels{7, 2, 1};
    CHECK(parse_idx_labels(encode_idx_labels(labels)) == labels);
    CHECK_THROWS_AS(parse_idx_labels(encode_idx_images(imgs)), IdxError);
    CHECK_THROWS_AS(parse_idx_images(encode_idx_labels(labels)), IdxError);
    auto truncated = encode_idx_images(imgs);
    truncated.pop_back();
    CHECK_THROWS_AS(parse_idx_images(truncated), IdxError);
    CHECK_THROWS_AS(parse_idx_images("\x00\x00"), IdxError);
}

TEST_CASE("psnr") {
    auto a = random_image(16, 16, 3);
    auto b = a;
    CHECK(std::isinf(psnr({a, b})));
    for (auto& px : b.pixels) px = px == 255 ? 254 : px + 1;
    CHECK(mse({a, b}) == doctest::Approx(1.0));
    CHECK(psnr({a, b}) == doctest::Approx(48.1308).epsilon(1e-4));
    const GrayImage other{4, 4, std::vector<std::uint8_t>(16, 0)};
    CHECK_THROWS(mse({a, other}));
}

TEST_CASE("ssim") {
    const auto a = random_image(23, 19, 5);
    const auto b = add_gaussian_noise(a, 25, 42);
    CHECK(ssim({a, a}) == doctest::Approx(1.0));
    CHECK(ssim({a, b}) == doctest::Approx(brute_force_ssim(a, b)).epsilon(1e-9));
    CHECK(ssim({a, b}) == doctest::Approx(ssim({b, a})).epsilon(1e-12));
    CHECK(ssim({a, b}) < 1.0);
    const auto small = random_image(10, 20, 1);
    CHECK_THROWS_AS(ssim({small, small}), std::domain_error);
}

TEST_CASE("noise injection is seeded") {
    const auto a = random_image(32, 32, 8);
    CHECK(add_gaussian_noise(a, 25, 42).pixels == add_gaussian_noise(a, 25, 42).pixels);
    CHECK(add_gaussian_noise(a, 25, 42).pixels != add_gaussian_noise(a, 25, 43).pixels);
    GrayImage flat{64, 64, std::vector<std::uint8_t>(64 * 64, 128)};
    const double e25 = mse({flat, add_gaussian_noise(flat, 25, 1)});
    const double e50 = mse({flat, add_gaussian_noise(flat, 50, 1)});
    CHECK(std::sqrt(e25) == doctest::Approx(25).epsilon(0.05));
    CHECK(e50 > e25);
}

}
