#include "axmul/nn/image.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "axmul/io.hpp"

namespace axmul::nn {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;

void check_pair(const ImagePair& p) {
    if (p.reference.width != p.test.width || p.reference.height != p.test.height) {
        throw std::invalid_argument("image dimensions differ");
    }
    if (p.reference.pixels.size() != p.reference.width * p.reference.height ||
        p.test.pixels.size() != p.test.width * p.test.height) {
        throw std::invalid_argument("image payload does not match its dimensions");
    }
}

std::array<double, kWindow> gaussian_1d() {
    std::array<double, kWindow> g{};
    double total = 0;
    for (int i = 0; i < kWindow; ++i) {
        const double d = i - kWindow / 2;
        g[i] = std::exp(-d * d / (2 * kSigma * kSigma));
        total += g[i];
    }
    for (auto& v : g) v /= total;
    return g;
}

/// Valid-mode separable filtering of `src` (w x h) with the 11-tap Gaussian.
std::vector<double> filter_valid(const std::vector<double>& src, std::size_t w, std::size_t h) {
    static const auto g = gaussian_1d();
    const std::size_t ow = w - kWindow + 1, oh = h - kWindow + 1;
    std::vector<double> rows(ow * h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < ow; ++x) {
            double s = 0;
            for (int k = 0; k < kWindow; ++k) s += g[k] * src[y * w + x + k];
            rows[y * ow + x] = s;
        }
    }
    std::vector<double> out(ow * oh);
    for (std::size_t y = 0; y < oh; ++y) {
        for (std::size_t x = 0; x < ow; ++x) {
            double s = 0;
            for (int k = 0; k < kWindow; ++k) s += g[k] * rows[(y + k) * ow + x];
            out[y * ow + x] = s;
        }
    }
    return out;
}

}  // namespace

GrayImage parse_pgm(const std::string& bytes) {
    std::size_t pos = 0;
    auto skip_space = [&] {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto read_uint = [&] {
        skip_space();
        std::size_t v = 0;
        bool any = false;
        while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
            v = v * 10 + std::size_t(bytes[pos++] - '0');
            any = true;
            if (v > (1u << 24)) throw ImageError("PGM header value too large");
        }
        if (!any) throw ImageError("malformed PGM header");
        return v;
    };
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') throw ImageError("not a binary PGM (P5)");
    pos = 2;
    GrayImage img;
    img.width = read_uint();
    img.height = read_uint();
    const std::size_t maxval = read_uint();
    if (maxval != 255) throw ImageError("only 8-bit PGM (maxval 255) is supported");
    if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        throw ImageError("malformed PGM header");
    }
    ++pos;
    const std::size_t n = img.width * img.height;
    if (bytes.size() - pos < n) throw ImageError("truncated PGM payload");
    img.pixels.assign(bytes.begin() + std::ptrdiff_t(pos), bytes.begin() + std::ptrdiff_t(pos + n));
    return img;
}

GrayImage read_pgm(const std::string& path) {
    std::string bytes;
    try {
        bytes = read_file(path);
    } catch (const std::runtime_error& e) {
        throw ImageError(e.what());
    }
    return parse_pgm(bytes);
}

std::string encode_pgm(const GrayImage& image) {
    std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
    out.append(image.pixels.begin(), image.pixels.end());
    return out;
}

void write_pgm(const GrayImage& image, const std::string& path) { write_file_atomic(path, encode_pgm(image)); }

double mse(const ImagePair& p) {
    check_pair(p);
    if (p.reference.pixels.empty()) throw std::invalid_argument("empty image");
    double total = 0;
    for (std::size_t i = 0; i < p.reference.pixels.size(); ++i) {
        const double d = double(p.reference.pixels[i]) - double(p.test.pixels[i]);
        total += d * d;
    }
    return total / double(p.reference.pixels.size());
}

double psnr(const ImagePair& p) {
    const double e = mse(p);
    if (e == 0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(p.peak * p.peak / e);
}

double ssim(const ImagePair& p) {
    check_pair(p);
    const std::size_t w = p.reference.width, h = p.reference.height;
    if (w < std::size_t(kWindow) || h < std::size_t(kWindow)) {
        throw std::domain_error("SSIM needs images of at least 11x11");
    }
    const std::size_t n = w * h;
    std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = p.reference.pixels[i];
        y[i] = p.test.pixels[i];
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    const auto mx = filter_valid(x, w, h), my = filter_valid(y, w, h);
    const auto sxx = filter_valid(xx, w, h), syy = filter_valid(yy, w, h), sxy = filter_valid(xy, w, h);
    const double c1 = (kK1 * p.peak) * (kK1 * p.peak);
    const double c2 = (kK2 * p.peak) * (kK2 * p.peak);
    double total = 0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
        const double vx = sxx[i] - mx[i] * mx[i];
        const double vy = syy[i] - my[i] * my[i];
        const double cov = sxy[i] - mx[i] * my[i];
        total += ((2 * mx[i] * my[i] + c1) * (2 * cov + c2)) /
                 ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    return total / double(mx.size());
}

GrayImage add_gaussian_noise(const GrayImage& image, double sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    GrayImage out = image;
    for (auto& px : out.pixels) px = std::uint8_t(std::clamp(std::round(double(px) + noise(rng)), 0.0, 255.0));
    return out;
}

}  // namespace axmul::nn
