#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace axmul::nn {

using Shape = std::vector<std::size_t>;

std::size_t element_count(const Shape& shape);

/// Shape or operand mismatch in a layer call.
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Sign-magnitude 8-bit tensor: real value = (negative ? -1 : 1) * magnitude * scale.
struct QuantizedTensor {
    Shape shape;
    std::vector<std::uint8_t> magnitudes;
    std::vector<std::uint8_t> negative;  // 0 or 1 per element
    double scale = 1.0;

    std::size_t size() const { return magnitudes.size(); }
    int signed_value(std::size_t i) const { return negative[i] ? -int(magnitudes[i]) : int(magnitudes[i]); }
    double real(std::size_t i) const { return signed_value(i) * scale; }
    void check() const;
};

/// Exact integer accumulators; real value = value * scale.
struct AccTensor {
    Shape shape;
    std::vector<std::int32_t> values;
    double scale = 1.0;

    std::size_t size() const { return values.size(); }
};

/// Symmetric per-tensor quantization: scale = max|v| / 255 (1 for an all-zero
/// tensor), magnitude = round(|v| / scale).
QuantizedTensor quantize(std::span<const float> values, Shape shape);
/// Fixed scale; magnitudes saturate at 255.
QuantizedTensor quantize_with_scale(std::span<const float> values, Shape shape, double scale);
std::vector<float> dequantize(const QuantizedTensor& q);

/// Accumulators to 8-bit magnitudes at `out_scale`, rounding and saturating.
QuantizedTensor requantize(const AccTensor& acc, double out_scale);

}  // namespace axmul::nn
