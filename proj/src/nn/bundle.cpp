#include "axmul/nn/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "axmul/io.hpp"
#include "axmul/nn/base64.hpp"
#include "axmul/nn/image.hpp"

namespace axmul::nn {

using nlohmann::json;

namespace {

std::vector<std::int32_t> bias_to_acc(const Layer& layer, double acc_scale) {
    std::vector<std::int32_t> out;
    out.reserve(layer.bias.size());
    for (double b : layer.bias) out.push_back(std::int32_t(std::llround(b / acc_scale)));
    return out;
}

std::vector<std::uint8_t> pack_signs(const std::vector<std::uint8_t>& negative) {
    std::vector<std::uint8_t> bits((negative.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < negative.size(); ++i) {
        if (negative[i]) bits[i / 8] |= std::uint8_t(1u << (i % 8));
    }
    return bits;
}

Layer parse_layer(const json& j, std::size_t index) {
    Layer layer;
    const auto where = "layer " + std::to_string(index) + ": ";
    if (!j.is_object() || !j.contains("kind")) throw BundleError(where + "missing kind");
    layer.kind = parse_layer_kind(j.at("kind").get<std::string>());
    if (!layer.has_weights()) return layer;

    QuantizedTensor& w = layer.weights;
    w.shape = j.at("shape").get<Shape>();
    w.scale = j.at("scale").get<double>();
    try {
        w.magnitudes = base64_decode(j.at("weights_b64").get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw BundleError(where + "weights_b64: " + e.what());
    }
    const std::size_t n = element_count(w.shape);
    if (w.magnitudes.size() != n) {
        throw BundleError(where + "expected " + std::to_string(n) + " weights, got " +
                          std::to_string(w.magnitudes.size()));
    }
    w.negative.assign(n, 0);
    if (j.contains("signs_b64")) {
        std::vector<std::uint8_t> bits;
        try {
            bits = base64_decode(j.at("signs_b64").get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw BundleError(where + "signs_b64: " + e.what());
        }
        if (bits.size() != (n + 7) / 8) throw BundleError(where + "sign payload has the wrong length");
        for (std::size_t i = 0; i < n; ++i) w.negative[i] = (bits[i / 8] >> (i % 8)) & 1u;
    }
    if (j.contains("bias")) layer.bias = j.at("bias").get<std::vector<double>>();
    layer.padding = j.value("padding", std::size_t{0});
    layer.out_scale = j.value("out_scale", 0.0);
    return layer;
}

}  // namespace

std::string to_string(LayerKind kind) {
    switch (kind) {
        case LayerKind::Conv2d: return "conv2d";
        case LayerKind::Dense: return "dense";
        case LayerKind::Relu: return "relu";
        case LayerKind::MaxPool2: return "maxpool2";
        case LayerKind::Flatten: return "flatten";
    }
    return "?";
}

LayerKind parse_layer_kind(const std::string& name) {
    for (LayerKind k : {LayerKind::Conv2d, LayerKind::Dense, LayerKind::Relu, LayerKind::MaxPool2, LayerKind::Flatten}) {
        if (to_string(k) == name) return k;
    }
    throw BundleError("unknown layer kind '" + name + "'");
}

std::vector<Shape> WeightBundle::shape_chain() const {
    std::vector<Shape> chain;
    Shape s = input_shape;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const Layer& l = layers[i];
        const auto where = "layer " + std::to_string(i) + " (" + to_string(l.kind) + "): ";
        switch (l.kind) {
            case LayerKind::Conv2d: {
                const Shape& w = l.weights.shape;
                if (s.size() != 3) throw BundleError(where + "input must be (C,H,W)");
                if (w.size() != 4 || w[1] != s[0]) throw BundleError(where + "weight shape does not match input channels");
                if (s[1] + 2 * l.padding < w[2] || s[2] + 2 * l.padding < w[3]) {
                    throw BundleError(where + "kernel larger than padded input");
                }
                s = {w[0], s[1] + 2 * l.padding - w[2] + 1, s[2] + 2 * l.padding - w[3] + 1};
                break;
            }
            case LayerKind::Dense: {
                const Shape& w = l.weights.shape;
                if (s.size() != 1) throw BundleError(where + "input must be flat");
                if (w.size() != 2 || w[1] != s[0]) throw BundleError(where + "weight shape does not match input");
                s = {w[0]};
                break;
            }
            case LayerKind::Relu: break;
            case LayerKind::MaxPool2:
                if (s.size() < 2 || s[s.size() - 1] < 2 || s[s.size() - 2] < 2) {
                    throw BundleError(where + "input too small to pool");
                }
                s[s.size() - 2] /= 2;
                s[s.size() - 1] /= 2;
                break;
            case LayerKind::Flatten: s = {element_count(s)}; break;
        }
        chain.push_back(s);
    }
    return chain;
}

bool WeightBundle::fully_convolutional() const {
    for (const Layer& l : layers) {
        if (l.kind == LayerKind::Dense || l.kind == LayerKind::Flatten) return false;
    }
    return true;
}

bool WeightBundle::accepts(const Shape& shape) const {
    if (shape == input_shape) return true;
    if (!fully_convolutional() || shape.size() != 3 || input_shape.size() != 3 || shape[0] != input_shape[0]) {
        return false;
    }
    WeightBundle probe;
    probe.input_shape = shape;
    probe.layers = {};
    for (const Layer& l : layers) {
        Layer stub;
        stub.kind = l.kind;
        stub.padding = l.padding;
        stub.weights.shape = l.weights.shape;
        probe.layers.push_back(std::move(stub));
    }
    try {
        (void)probe.shape_chain();
    } catch (const BundleError&) {
        return false;
    }
    return true;
}

void WeightBundle::validate() const {
    if (version != kVersion) throw BundleError("unsupported bundle version " + std::to_string(version));
    if (input_shape.empty()) throw BundleError("missing input shape");
    if (!(input_scale > 0)) throw BundleError("input scale must be positive");
    if (layers.empty()) throw BundleError("bundle has no layers");
    (void)shape_chain();

    std::size_t last_weighted = layers.size();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].has_weights()) last_weighted = i;
    }
    if (last_weighted == layers.size()) throw BundleError("bundle has no conv2d or dense layer");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const Layer& l = layers[i];
        if (!l.has_weights()) continue;
        const auto where = "layer " + std::to_string(i) + ": ";
        try {
            l.weights.check();
        } catch (const ContractError& e) {
            throw BundleError(where + e.what());
        }
        if (!l.bias.empty() && l.bias.size() != l.weights.shape[0]) throw BundleError(where + "bias length mismatch");
        if (i != last_weighted && !(l.out_scale > 0)) throw BundleError(where + "out_scale required between layers");
    }
}

WeightBundle parse_bundle(const std::string& json_text) {
    WeightBundle b;
    try {
        const json j = json::parse(json_text);
        b.version = j.at("version").get<int>();
        b.input_shape = j.at("input").at("shape").get<Shape>();
        b.input_scale = j.at("input").value("scale", 1.0 / 255.0);
        const json& layers = j.at("layers");
        if (!layers.is_array()) throw BundleError("layers must be an array");
        for (std::size_t i = 0; i < layers.size(); ++i) b.layers.push_back(parse_layer(layers[i], i));
        if (j.contains("metadata")) {
            for (const auto& [k, v] : j.at("metadata").items()) b.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
        }
    } catch (const json::exception& e) {
        throw BundleError(std::string("malformed bundle: ") + e.what());
    }
    b.validate();
    return b;
}

std::string serialize_bundle(const WeightBundle& bundle) {
    json j;
    j["version"] = bundle.version;
    j["input"] = {{"shape", bundle.input_shape}, {"scale", bundle.input_scale}};
    json layers = json::array();
    for (const Layer& l : bundle.layers) {
        json jl;
        jl["kind"] = to_string(l.kind);
        if (l.has_weights()) {
            jl["shape"] = l.weights.shape;
            jl["scale"] = l.weights.scale;
            jl["weights_b64"] = base64_encode(l.weights.magnitudes);
            jl["signs_b64"] = base64_encode(pack_signs(l.weights.negative));
            jl["bias"] = l.bias;
            if (l.kind == LayerKind::Conv2d) jl["padding"] = l.padding;
            if (l.out_scale > 0) jl["out_scale"] = l.out_scale;
        }
        layers.push_back(std::move(jl));
    }
    j["layers"] = std::move(layers);
    j["metadata"] = bundle.metadata;
    return j.dump(1);
}

WeightBundle load_bundle(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::runtime_error& e) {
        throw BundleError(e.what());
    }
    return parse_bundle(text);
}

void save_bundle(const WeightBundle& bundle, const std::string& path) {
    bundle.validate();
    write_file_atomic(path, serialize_bundle(bundle));
}

AccTensor forward(const WeightBundle& bundle, const QuantizedTensor& input, const ProductLut& lut, unsigned threads) {
    if (!bundle.accepts(input.shape)) throw ContractError("input shape does not match the bundle");
    std::size_t last_weighted = 0;
    for (std::size_t i = 0; i < bundle.layers.size(); ++i) {
        if (bundle.layers[i].has_weights()) last_weighted = i;
    }

    QuantizedTensor x = input;
    AccTensor acc;
    bool in_acc = false;
    for (std::size_t i = 0; i < bundle.layers.size(); ++i) {
        const Layer& l = bundle.layers[i];
        switch (l.kind) {
            case LayerKind::Conv2d:
            case LayerKind::Dense: {
                if (in_acc) throw ContractError("weighted layer after the final accumulator stage");
                const auto bias = bias_to_acc(l, x.scale * l.weights.scale);
                acc = l.kind == LayerKind::Conv2d ? conv2d(x, l.weights, bias, lut, l.padding, threads)
                                                  : dense(x, l.weights, bias, lut);
                if (i == last_weighted) {
                    in_acc = true;
                } else {
                    x = requantize(acc, l.out_scale);
                }
                break;
            }
            case LayerKind::Relu:
                if (in_acc) acc = relu(std::move(acc)); else x = relu(std::move(x));
                break;
            case LayerKind::MaxPool2:
                if (in_acc) acc = maxpool2(acc); else x = maxpool2(x);
                break;
            case LayerKind::Flatten:
                if (in_acc) acc = flatten(std::move(acc)); else x = flatten(std::move(x));
                break;
        }
    }
    return acc;
}

std::size_t classify(const WeightBundle& bundle, const QuantizedTensor& input, const ProductLut& lut,
                     unsigned threads) {
    return argmax(forward(bundle, input, lut, threads).values);
}

QuantizedTensor quantize_pixels(const WeightBundle& bundle, std::span<const std::uint8_t> pixels) {
    std::vector<float> real(pixels.size());
    for (std::size_t i = 0; i < pixels.size(); ++i) real[i] = float(pixels[i]) / 255.0f;
    return quantize_with_scale(real, bundle.input_shape, bundle.input_scale);
}

QuantizedTensor quantize_pixels(const GrayImage& image, double input_scale) {
    std::vector<float> real(image.pixels.size());
    for (std::size_t i = 0; i < real.size(); ++i) real[i] = float(image.pixels[i]) / 255.0f;
    return quantize_with_scale(real, Shape{1, image.height, image.width}, input_scale);
}

GrayImage denoise(const WeightBundle& bundle, const GrayImage& noisy, const ProductLut& lut, unsigned threads) {
    const AccTensor out = forward(bundle, quantize_pixels(noisy, bundle.input_scale), lut, threads);
    if (out.shape != Shape{1, noisy.height, noisy.width}) {
        throw ContractError("denoiser output must be (1, H, W) matching the input image");
    }
    const auto it = bundle.metadata.find("output");
    const bool residual = it != bundle.metadata.end() && it->second == "residual";
    GrayImage img = noisy;
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        const double predicted = double(out.values[i]) * out.scale * 255.0;
        const double v = residual ? double(noisy.pixels[i]) - predicted : predicted;
        img.pixels[i] = std::uint8_t(std::clamp(std::round(v), 0.0, 255.0));
    }
    return img;
}

}  // namespace axmul::nn
