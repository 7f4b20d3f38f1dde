#include "axmul/nn/idx.hpp"

#include "axmul/io.hpp"

namespace axmul::nn {

namespace {

std::uint32_t read_be32(const std::string& bytes, std::size_t offset) {
    if (bytes.size() < offset + 4) throw IdxError("truncated IDX header");
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < 4; ++i) v = v << 8 | std::uint8_t(bytes[offset + i]);
    return v;
}

void put_be32(std::string& out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out += char((v >> shift) & 0xFF);
}

std::string load(const std::string& path) {
    try {
        return read_file(path);
    } catch (const std::runtime_error& e) {
        throw IdxError(e.what());
    }
}

}  // namespace

IdxImages parse_idx_images(const std::string& bytes) {
    const std::uint32_t magic = read_be32(bytes, 0);
    if (magic != kIdxImagesMagic) throw IdxError("bad IDX image magic");
    IdxImages out;
    out.count = read_be32(bytes, 4);
    out.rows = read_be32(bytes, 8);
    out.cols = read_be32(bytes, 12);
    const std::size_t n = out.count * out.rows * out.cols;
    if (bytes.size() - 16 < n) throw IdxError("truncated IDX image payload");
    out.pixels.assign(bytes.begin() + 16, bytes.begin() + 16 + std::ptrdiff_t(n));
    return out;
}

std::vector<std::uint8_t> parse_idx_labels(const std::string& bytes) {
    const std::uint32_t magic = read_be32(bytes, 0);
    if (magic != kIdxLabelsMagic) throw IdxError("bad IDX label magic");
    const std::size_t n = read_be32(bytes, 4);
    if (bytes.size() - 8 < n) throw IdxError("truncated IDX label payload");
    return std::vector<std::uint8_t>(bytes.begin() + 8, bytes.begin() + 8 + std::ptrdiff_t(n));
}

IdxImages read_idx_images(const std::string& path) { return parse_idx_images(load(path)); }

std::vector<std::uint8_t> read_idx_labels(const std::string& path) { return parse_idx_labels(load(path)); }

std::string encode_idx_images(const IdxImages& images) {
    std::string out;
    put_be32(out, kIdxImagesMagic);
    put_be32(out, std::uint32_t(images.count));
    put_be32(out, std::uint32_t(images.rows));
    put_be32(out, std::uint32_t(images.cols));
    out.append(images.pixels.begin(), images.pixels.end());
    return out;
}

std::string encode_idx_labels(std::span<const std::uint8_t> labels) {
    std::string out;
    put_be32(out, kIdxLabelsMagic);
    put_be32(out, std::uint32_t(labels.size()));
    out.append(labels.begin(), labels.end());
    return out;
}

}  // namespace axmul::nn
