#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "axmul/nn/image.hpp"
#include "axmul/nn/layers.hpp"

namespace axmul::nn {

/// Malformed or inconsistent weight bundle.
class BundleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class LayerKind { Conv2d, Dense, Relu, MaxPool2, Flatten };

std::string to_string(LayerKind kind);
LayerKind parse_layer_kind(const std::string& name);

struct Layer {
    LayerKind kind = LayerKind::Relu;
    QuantizedTensor weights;        // conv2d (OC,C,KH,KW) / dense (OUT,IN)
    std::vector<double> bias;       // real-valued, one per output channel
    std::size_t padding = 0;        // conv2d only
    double out_scale = 0;           // activation scale after this layer; 0 = keep accumulators

    bool has_weights() const { return kind == LayerKind::Conv2d || kind == LayerKind::Dense; }
};

/// Portable quantized network. On disk:
/// {"version": 1, "input": {"shape": [...], "scale": s},
///  "layers": [{"kind", "shape", "scale", "weights_b64", "signs_b64", "bias", "padding", "out_scale"}, ...],
///  "metadata": {...}}
/// weights_b64 holds row-major 8-bit magnitudes; signs_b64 holds one bit per
/// weight (LSB first, 1 = negative) and may be omitted for all-positive weights.
struct WeightBundle {
    static constexpr int kVersion = 1;

    int version = kVersion;
    Shape input_shape;
    double input_scale = 1.0 / 255.0;
    std::vector<Layer> layers;
    std::map<std::string, std::string> metadata;

    /// Shape chain, payload sizes and scales. Throws BundleError.
    void validate() const;
    /// Shape produced by each layer, in order.
    std::vector<Shape> shape_chain() const;
    /// No dense or flatten layers: any (C, H, W) input with the bundle's C works.
    bool fully_convolutional() const;
    /// Whether forward() accepts an input of this shape.
    bool accepts(const Shape& shape) const;
};

WeightBundle parse_bundle(const std::string& json_text);
std::string serialize_bundle(const WeightBundle& bundle);
WeightBundle load_bundle(const std::string& path);
void save_bundle(const WeightBundle& bundle, const std::string& path);

/// Forward pass. Each weighted layer followed by another weighted layer is
/// requantized to its out_scale; the last one returns exact accumulators.
/// Fully convolutional bundles accept any spatial size.
AccTensor forward(const WeightBundle& bundle, const QuantizedTensor& input, const ProductLut& lut,
                  unsigned threads = 1);

/// argmax of forward() for a classification bundle.
std::size_t classify(const WeightBundle& bundle, const QuantizedTensor& input, const ProductLut& lut,
                     unsigned threads = 1);

/// 8-bit pixels quantized at the bundle's input scale (pixel / 255 as real value).
QuantizedTensor quantize_pixels(const WeightBundle& bundle, std::span<const std::uint8_t> pixels);
/// Single-channel (1, H, W) tensor from an image at the given input scale.
QuantizedTensor quantize_pixels(const GrayImage& image, double input_scale);

/// Denoiser output mapped back to pixels. Bundles with metadata
/// `output: residual` predict noise that is subtracted from `noisy`; otherwise
/// the output is the clean image in [0, 1] units.
GrayImage denoise(const WeightBundle& bundle, const GrayImage& noisy, const ProductLut& lut, unsigned threads = 1);

}  // namespace axmul::nn
