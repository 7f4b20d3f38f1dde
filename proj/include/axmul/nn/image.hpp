#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace axmul::nn {

class ImageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 8-bit grayscale image, row-major.
struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;

    std::uint8_t at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
};

struct ImagePair {
    const GrayImage& reference;
    const GrayImage& test;
    double peak = 255.0;
};

/// Binary PGM (P5), maxval 255; comments in the header are skipped.
GrayImage read_pgm(const std::string& path);
GrayImage parse_pgm(const std::string& bytes);
std::string encode_pgm(const GrayImage& image);
void write_pgm(const GrayImage& image, const std::string& path);

double mse(const ImagePair& p);
/// 10 log10(peak^2 / MSE); +infinity when the images are identical.
double psnr(const ImagePair& p);
/// Mean SSIM over all valid 11x11 Gaussian windows (sigma 1.5, K1 0.01, K2 0.03).
/// Throws std::domain_error when either dimension is below 11.
double ssim(const ImagePair& p);

/// Adds N(0, sigma^2) noise per pixel from a seeded mt19937_64, rounding and clamping.
GrayImage add_gaussian_noise(const GrayImage& image, double sigma, std::uint64_t seed);

}  // namespace axmul::nn
