#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "axmul/io.hpp"
#include "axmul/nn/tensor.hpp"

namespace testing {

inline std::string golden(const std::string& name) { return axmul::read_file(std::string(AXMUL_GOLDEN_DIR) + "/" + name); }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("axmul_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline axmul::nn::QuantizedTensor random_tensor(std::mt19937_64& rng, axmul::nn::Shape shape, double scale,
                                                bool allow_negative = true) {
    axmul::nn::QuantizedTensor t;
    t.shape = shape;
    t.scale = scale;
    const std::size_t n = axmul::nn::element_count(shape);
    std::uniform_int_distribution<int> mag(0, 255), sign(0, 1);
    for (std::size_t i = 0; i < n; ++i) {
        t.magnitudes.push_back(std::uint8_t(mag(rng)));
        t.negative.push_back(std::uint8_t(allow_negative && t.magnitudes.back() ? sign(rng) : 0));
    }
    return t;
}

/// Direct nested-loop convolution with plain integer products.
inline std::vector<std::int64_t> reference_conv(const axmul::nn::QuantizedTensor& x, const axmul::nn::QuantizedTensor& w,
                                                const std::vector<std::int32_t>& bias, std::size_t pad) {
    const std::size_t C = x.shape[0], H = x.shape[1], W = x.shape[2];
    const std::size_t OC = w.shape[0], KH = w.shape[2], KW = w.shape[3];
    const std::size_t OH = H + 2 * pad - KH + 1, OW = W + 2 * pad - KW + 1;
    std::vector<std::int64_t> out(OC * OH * OW, 0);
    for (std::size_t oc = 0; oc < OC; ++oc)
        for (std::size_t oy = 0; oy < OH; ++oy)
            for (std::size_t ox = 0; ox < OW; ++ox) {
                std::int64_t acc = bias.empty() ? 0 : bias[oc];
                for (std::size_t c = 0; c < C; ++c)
                    for (std::size_t ky = 0; ky < KH; ++ky)
                        for (std::size_t kx = 0; kx < KW; ++kx) {
                            const long iy = long(oy + ky) - long(pad), ix = long(ox + kx) - long(pad);
                            if (iy < 0 || ix < 0 || iy >= long(H) || ix >= long(W)) continue;
                            acc += std::int64_t(x.signed_value((c * H + std::size_t(iy)) * W + std::size_t(ix))) *
                                   w.signed_value(((oc * C + c) * KH + ky) * KW + kx);
                        }
                out[(oc * OH + oy) * OW + ox] = acc;
            }
    return out;
}

}  // namespace testing
