#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "axmul/nn/tensor.hpp"

namespace axmul::nn {

namespace {

std::uint8_t round_magnitude(double x) {
    const double r = std::round(x);
    return std::uint8_t(std::clamp(r, 0.0, 255.0));
}

}  // namespace

std::size_t element_count(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

void QuantizedTensor::check() const {
    if (magnitudes.size() != element_count(shape) || negative.size() != magnitudes.size()) {
        throw ContractError("quantized tensor payload does not match its shape");
    }
    if (!(scale > 0) || !std::isfinite(scale)) throw ContractError("quantized tensor scale must be positive");
}

QuantizedTensor quantize(std::span<const float> values, Shape shape) {
    double max_abs = 0;
    for (float v : values) {
        if (!std::isfinite(v)) throw ContractError("cannot quantize a non-finite value");
        max_abs = std::max(max_abs, double(std::fabs(v)));
    }
    return quantize_with_scale(values, std::move(shape), max_abs > 0 ? max_abs / 255.0 : 1.0);
}

QuantizedTensor quantize_with_scale(std::span<const float> values, Shape shape, double scale) {
    if (values.size() != element_count(shape)) throw ContractError("value count does not match shape");
    if (!(scale > 0) || !std::isfinite(scale)) throw ContractError("quantization scale must be positive");
    QuantizedTensor q;
    q.shape = std::move(shape);
    q.scale = scale;
    q.magnitudes.resize(values.size());
    q.negative.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) throw ContractError("cannot quantize a non-finite value");
        q.magnitudes[i] = round_magnitude(std::fabs(double(values[i])) / scale);
        q.negative[i] = values[i] < 0 && q.magnitudes[i] != 0;
    }
    return q;
}

std::vector<float> dequantize(const QuantizedTensor& q) {
    q.check();
    std::vector<float> out(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) out[i] = float(q.real(i));
    return out;
}

QuantizedTensor requantize(const AccTensor& acc, double out_scale) {
    if (!(out_scale > 0)) throw ContractError("output scale must be positive");
    QuantizedTensor q;
    q.shape = acc.shape;
    q.scale = out_scale;
    q.magnitudes.resize(acc.size());
    q.negative.resize(acc.size());
    const double ratio = acc.scale / out_scale;
    for (std::size_t i = 0; i < acc.size(); ++i) {
        const double v = double(acc.values[i]) * ratio;
        q.magnitudes[i] = round_magnitude(std::fabs(v));
        q.negative[i] = v < 0 && q.magnitudes[i] != 0;
    }
    return q;
}

}  // namespace axmul::nn
