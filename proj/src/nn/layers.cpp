#include "axmul/nn/layers.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <thread>

namespace axmul::nn {

namespace {

std::int32_t narrow_acc(std::int64_t v) {
    if (v < std::numeric_limits<std::int32_t>::min() || v > std::numeric_limits<std::int32_t>::max()) {
        throw ContractError("accumulator overflow");
    }
    return std::int32_t(v);
}

void check_lut(const ProductLut& lut) {
    if (lut.size() != kLutSize) throw ContractError("product table must have 65536 entries");
}

Shape pooled_shape(const Shape& s) {
    if (s.size() < 2) throw ContractError("maxpool2 needs at least two dims");
    Shape out = s;
    out[s.size() - 2] = s[s.size() - 2] / 2;
    out[s.size() - 1] = s[s.size() - 1] / 2;
    if (out[s.size() - 2] == 0 || out[s.size() - 1] == 0) throw ContractError("maxpool2 input too small");
    return out;
}

/// Calls pick(dst, src) for each 2x2 window; pick keeps the larger element.
template <typename Pick>
void pool_windows(const Shape& in_shape, const Shape& out_shape, Pick&& pick) {
    const std::size_t h = in_shape[in_shape.size() - 2], w = in_shape.back();
    const std::size_t oh = out_shape[out_shape.size() - 2], ow = out_shape.back();
    const std::size_t planes = element_count(in_shape) / (h * w);
    for (std::size_t p = 0; p < planes; ++p) {
        for (std::size_t y = 0; y < oh; ++y) {
            for (std::size_t x = 0; x < ow; ++x) {
                const std::size_t dst = (p * oh + y) * ow + x;
                bool first = true;
                for (std::size_t dy = 0; dy < 2; ++dy) {
                    for (std::size_t dx = 0; dx < 2; ++dx) {
                        pick(dst, (p * h + 2 * y + dy) * w + 2 * x + dx, first);
                        first = false;
                    }
                }
            }
        }
    }
}

}  // namespace

AccTensor conv2d(const QuantizedTensor& input, const QuantizedTensor& weights, std::span<const std::int32_t> bias,
                 const ProductLut& lut, std::size_t padding, unsigned threads) {
    input.check();
    weights.check();
    check_lut(lut);
    if (input.shape.size() != 3 && input.shape.size() != 4) throw ContractError("conv2d input must be (C,H,W) or (N,C,H,W)");
    if (weights.shape.size() != 4) throw ContractError("conv2d weights must be (OC,C,KH,KW)");
    const bool batched = input.shape.size() == 4;
    const std::size_t n = batched ? input.shape[0] : 1;
    const std::size_t c = input.shape[batched ? 1 : 0];
    const std::size_t h = input.shape[batched ? 2 : 1];
    const std::size_t w = input.shape[batched ? 3 : 2];
    const std::size_t oc = weights.shape[0], kh = weights.shape[2], kw = weights.shape[3];
    if (weights.shape[1] != c) {
        throw ContractError("conv2d channel mismatch: input " + std::to_string(c) + ", weights " +
                            std::to_string(weights.shape[1]));
    }
    if (!bias.empty() && bias.size() != oc) throw ContractError("conv2d bias length mismatch");
    if (h + 2 * padding < kh || w + 2 * padding < kw) throw ContractError("conv2d kernel larger than padded input");
    const std::size_t oh = h + 2 * padding - kh + 1, ow = w + 2 * padding - kw + 1;

    AccTensor out;
    out.shape = batched ? Shape{n, oc, oh, ow} : Shape{oc, oh, ow};
    out.values.assign(n * oc * oh * ow, 0);
    out.scale = input.scale * weights.scale;

    auto channel = [&](std::size_t job) {
        const std::size_t b = job / oc, o = job % oc;
        for (std::size_t y = 0; y < oh; ++y) {
            for (std::size_t x = 0; x < ow; ++x) {
                std::int64_t acc = bias.empty() ? 0 : bias[o];
                for (std::size_t ci = 0; ci < c; ++ci) {
                    for (std::size_t ky = 0; ky < kh; ++ky) {
                        const std::ptrdiff_t iy = std::ptrdiff_t(y + ky) - std::ptrdiff_t(padding);
                        if (iy < 0 || iy >= std::ptrdiff_t(h)) continue;
                        for (std::size_t kx = 0; kx < kw; ++kx) {
                            const std::ptrdiff_t ix = std::ptrdiff_t(x + kx) - std::ptrdiff_t(padding);
                            if (ix < 0 || ix >= std::ptrdiff_t(w)) continue;
                            const std::size_t wi = ((o * c + ci) * kh + ky) * kw + kx;
                            const std::size_t ai = ((b * c + ci) * h + std::size_t(iy)) * w + std::size_t(ix);
                            acc += lut_mac_term(lut, weights.magnitudes[wi], weights.negative[wi],
                                                input.magnitudes[ai], input.negative[ai]);
                        }
                    }
                }
                out.values[((b * oc + o) * oh + y) * ow + x] = narrow_acc(acc);
            }
        }
    };

    const std::size_t jobs = n * oc;
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, unsigned(jobs)));
    if (workers == 1) {
        for (std::size_t j = 0; j < jobs; ++j) channel(j);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < workers; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t j = t; j < jobs; j += workers) channel(j);
            });
        }
        for (auto& th : pool) th.join();
    }
    return out;
}

AccTensor dense(const QuantizedTensor& input, const QuantizedTensor& weights, std::span<const std::int32_t> bias,
                const ProductLut& lut) {
    input.check();
    weights.check();
    check_lut(lut);
    if (input.shape.size() != 1) throw ContractError("dense input must be flat");
    if (weights.shape.size() != 2 || weights.shape[1] != input.shape[0]) {
        throw ContractError("dense weights must be (OUT, " + std::to_string(input.shape[0]) + ")");
    }
    const std::size_t out_n = weights.shape[0], in_n = weights.shape[1];
    if (!bias.empty() && bias.size() != out_n) throw ContractError("dense bias length mismatch");
    AccTensor out;
    out.shape = {out_n};
    out.values.resize(out_n);
    out.scale = input.scale * weights.scale;
    for (std::size_t o = 0; o < out_n; ++o) {
        std::int64_t acc = bias.empty() ? 0 : bias[o];
        for (std::size_t i = 0; i < in_n; ++i) {
            const std::size_t wi = o * in_n + i;
            acc += lut_mac_term(lut, weights.magnitudes[wi], weights.negative[wi], input.magnitudes[i],
                                input.negative[i]);
        }
        out.values[o] = narrow_acc(acc);
    }
    return out;
}

QuantizedTensor relu(QuantizedTensor x) {
    x.check();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x.negative[i]) {
            x.negative[i] = 0;
            x.magnitudes[i] = 0;
        }
    }
    return x;
}

AccTensor relu(AccTensor x) {
    for (auto& v : x.values) v = std::max(v, 0);
    return x;
}

QuantizedTensor maxpool2(const QuantizedTensor& x) {
    x.check();
    QuantizedTensor out;
    out.shape = pooled_shape(x.shape);
    out.scale = x.scale;
    out.magnitudes.resize(element_count(out.shape));
    out.negative.resize(out.magnitudes.size());
    pool_windows(x.shape, out.shape, [&](std::size_t dst, std::size_t src, bool first) {
        const int current = out.negative[dst] ? -int(out.magnitudes[dst]) : int(out.magnitudes[dst]);
        if (first || x.signed_value(src) > current) {
            out.magnitudes[dst] = x.magnitudes[src];
            out.negative[dst] = x.negative[src];
        }
    });
    return out;
}

AccTensor maxpool2(const AccTensor& x) {
    AccTensor out;
    out.shape = pooled_shape(x.shape);
    out.scale = x.scale;
    out.values.resize(element_count(out.shape));
    pool_windows(x.shape, out.shape, [&](std::size_t dst, std::size_t src, bool first) {
        if (first || x.values[src] > out.values[dst]) out.values[dst] = x.values[src];
    });
    return out;
}

QuantizedTensor flatten(QuantizedTensor x) {
    x.shape = {x.size()};
    return x;
}

AccTensor flatten(AccTensor x) {
    x.shape = {x.size()};
    return x;
}

std::size_t argmax(std::span<const std::int32_t> values) {
    if (values.empty()) throw ContractError("argmax of an empty tensor");
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

}  // namespace axmul::nn
