#pragma once

#include <cstdint>
#include <span>

#include "axmul/metrics.hpp"
#include "axmul/nn/tensor.hpp"

namespace axmul::nn {

/// Sign-magnitude multiply through the product table: the weight magnitude is
/// the first operand, the activation magnitude the second.
inline std::int64_t lut_mac_term(const ProductLut& lut, std::uint8_t w_mag, bool w_neg, std::uint8_t a_mag,
                                 bool a_neg) {
    const std::int64_t p = lut[lut_index(w_mag, a_mag)];
    return (w_neg != a_neg) ? -p : p;
}

/// Stride-1 convolution with symmetric zero padding.
/// input (C, H, W) or (N, C, H, W); weights (OC, C, KH, KW); bias has OC
/// accumulator-domain entries (or is empty). Output scale = input.scale * weights.scale.
AccTensor conv2d(const QuantizedTensor& input, const QuantizedTensor& weights, std::span<const std::int32_t> bias,
                 const ProductLut& lut, std::size_t padding = 0, unsigned threads = 1);

/// input flat (IN); weights (OUT, IN); bias OUT entries or empty.
AccTensor dense(const QuantizedTensor& input, const QuantizedTensor& weights, std::span<const std::int32_t> bias,
                const ProductLut& lut);

QuantizedTensor relu(QuantizedTensor x);
AccTensor relu(AccTensor x);

/// 2x2 window, stride 2, over the last two dims; odd trailing rows/cols dropped.
QuantizedTensor maxpool2(const QuantizedTensor& x);
AccTensor maxpool2(const AccTensor& x);

QuantizedTensor flatten(QuantizedTensor x);
AccTensor flatten(AccTensor x);

/// Index of the maximum; ties go to the lower index.
std::size_t argmax(std::span<const std::int32_t> values);

}  // namespace axmul::nn
