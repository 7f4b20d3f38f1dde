#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace axmul::nn {

class IdxError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

struct IdxImages {
    std::size_t count = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> pixels;  // count * rows * cols

    std::span<const std::uint8_t> image(std::size_t i) const {
        return std::span<const std::uint8_t>(pixels).subspan(i * rows * cols, rows * cols);
    }
};

IdxImages parse_idx_images(const std::string& bytes);
std::vector<std::uint8_t> parse_idx_labels(const std::string& bytes);
IdxImages read_idx_images(const std::string& path);
std::vector<std::uint8_t> read_idx_labels(const std::string& path);

std::string encode_idx_images(const IdxImages& images);
std::string encode_idx_labels(std::span<const std::uint8_t> labels);

}  // namespace axmul::nn
