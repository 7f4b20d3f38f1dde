#include "axmul/multiplier.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <sstream>
#include <stdexcept>

namespace axmul {

namespace {

constexpr int kMaxStages = 16;
constexpr int kReducibleColumns = kResultBits;  // column 16 only collects overflow

/// Fixed-capacity bit column for the hot simulation loop.
struct Bits {
    std::array<std::uint8_t, 48> v{};
    int n = 0;
    void push(std::uint8_t b) {
        if (n == int(v.size())) throw std::logic_error("column capacity exceeded");
        v[n++] = b;
    }
};

using BitColumns = std::array<Bits, kColumns>;

bool is_exact_column(const MultiplierConfig& cfg, int column) {
    switch (cfg.family) {
        case Family::Exact: return true;
        case Family::Design1Hybrid: return column >= cfg.exact_column_threshold;
        default: return false;
    }
}

BitColumns initial_columns(const MultiplierConfig& cfg, std::uint8_t a, std::uint8_t b) {
    BitColumns cols;
    const int trunc = cfg.family == Family::Design2Truncated ? cfg.truncation_width : 0;
    for (int j = trunc; j < kProductColumns; ++j) {
        for (int i = std::max(0, j - (kOperandBits - 1)); i <= std::min(j, kOperandBits - 1); ++i) {
            cols[j].push(std::uint8_t(((a >> i) & 1) & ((b >> (j - i)) & 1)));
        }
    }
    return cols;
}

struct NoTrace {
    void operator()(const CellEvent&) const {}
};

template <typename Hook>
BitColumns run_stage(const MultiplierConfig& cfg, const ReductionStage& stage, int stage_index,
                     const BitColumns& cur, Hook&& hook) {
    BitColumns next;
    std::array<Bits, kColumns + 1> carries;
    std::array<Bits, kColumns + 1> chain;
    for (int j = 0; j < kColumns; ++j) {
        const Bits& in = cur[j];
        int k = 0;
        int chain_used = 0;
        Bits sums;
        auto take = [&](int count) {
            if (k + count > in.n) throw std::logic_error("plan consumes more bits than column holds");
            unsigned pattern = 0;
            for (int t = 0; t < count; ++t) pattern |= unsigned(in.v[k + t]) << t;
            k += count;
            return pattern;
        };
        for (Reducer r : stage.placements[j]) {
            unsigned pattern = 0;
            int out_value = 0;
            switch (r) {
                case Reducer::Approx42: {
                    pattern = take(4);
                    const CompressorOutputs o = cfg.approx_table[pattern];
                    sums.push(o.sum);
                    carries[j + 1].push(o.carry);
                    out_value = o.value();
                    break;
                }
                case Reducer::Exact42: {
                    pattern = take(4);
                    bool cin = false;
                    if (chain_used < chain[j].n) {
                        cin = chain[j].v[chain_used++] != 0;
                        pattern |= unsigned(cin) << 4;
                    }
                    const CompressorOutputs o = exact_compressor(CompressorInputs::from_index(pattern & 0xF, cin));
                    sums.push(o.sum);
                    carries[j + 1].push(o.carry);
                    chain[j + 1].push(o.cout);
                    out_value = o.value();
                    break;
                }
                case Reducer::FullAdder:
                case Reducer::HalfAdder: {
                    pattern = take(input_count(r));
                    const int s = std::popcount(pattern);
                    sums.push(std::uint8_t(s & 1));
                    carries[j + 1].push(std::uint8_t(s >> 1));
                    out_value = s;
                    break;
                }
                case Reducer::Pass:
                    throw std::logic_error("PASS is implicit and cannot be placed");
            }
            hook(CellEvent{stage_index, j, r, pattern, std::popcount(pattern), out_value});
        }
        Bits& out = next[j];
        for (int t = k; t < in.n; ++t) out.push(in.v[t]);
        for (int t = 0; t < sums.n; ++t) out.push(sums.v[t]);
        for (int t = 0; t < carries[j].n; ++t) out.push(carries[j].v[t]);
        for (int t = chain_used; t < chain[j].n; ++t) out.push(chain[j].v[t]);
    }
    return next;
}

std::array<Column, kColumns> to_columns(const BitColumns& cols) {
    std::array<Column, kColumns> out;
    for (int j = 0; j < kColumns; ++j) out[j].assign(cols[j].v.begin(), cols[j].v.begin() + cols[j].n);
    return out;
}

template <typename Hook>
BitColumns run_plan(const MultiplierConfig& cfg, const ReductionPlan& plan, std::uint8_t a, std::uint8_t b,
                    Hook&& hook, std::vector<std::array<Column, kColumns>>* snapshots = nullptr) {
    BitColumns cols = initial_columns(cfg, a, b);
    if (snapshots) snapshots->push_back(to_columns(cols));
    for (std::size_t s = 0; s < plan.stages.size(); ++s) {
        cols = run_stage(cfg, plan.stages[s], int(s), cols, hook);
        if (snapshots) snapshots->push_back(to_columns(cols));
    }
    return cols;
}

std::uint16_t final_addition(const BitColumns& cols, std::uint32_t compensation) {
    std::uint32_t total = compensation;
    for (int j = 0; j < kColumns; ++j) {
        for (int t = 0; t < cols[j].n; ++t) total += std::uint32_t(cols[j].v[t]) << j;
    }
    return std::uint16_t(total & 0xFFFFu);
}

}  // namespace

std::uint32_t PartialProductMatrix::value() const {
    std::uint32_t v = 0;
    for (int j = 0; j < kProductColumns; ++j) {
        for (auto bit : columns[j]) v += std::uint32_t(bit) << j;
    }
    return v;
}

std::array<int, kProductColumns> PartialProductMatrix::heights() const {
    std::array<int, kProductColumns> h{};
    for (int j = 0; j < kProductColumns; ++j) h[j] = int(columns[j].size());
    return h;
}

PartialProductMatrix generate_pp(std::uint8_t a, std::uint8_t b) {
    PartialProductMatrix m;
    const auto cols = initial_columns(MultiplierConfig::exact(), a, b);
    for (int j = 0; j < kProductColumns; ++j) m.columns[j].assign(cols[j].v.begin(), cols[j].v.begin() + cols[j].n);
    return m;
}

std::string_view to_string(Family family) {
    switch (family) {
        case Family::Exact: return "exact";
        case Family::Design1Hybrid: return "design1";
        case Family::Design2Truncated: return "design2";
        case Family::ProposedFullApprox: return "proposed";
    }
    return "?";
}

Family parse_family(std::string_view name) {
    for (Family f : {Family::Exact, Family::Design1Hybrid, Family::Design2Truncated, Family::ProposedFullApprox}) {
        if (to_string(f) == name) return f;
    }
    throw ValidationError("unknown multiplier family '" + std::string(name) + "'");
}

MultiplierConfig MultiplierConfig::exact() { return MultiplierConfig{}; }

MultiplierConfig MultiplierConfig::proposed(CompressorTruthTable table) {
    MultiplierConfig c;
    c.family = Family::ProposedFullApprox;
    c.approx_table = std::move(table);
    return c;
}

MultiplierConfig MultiplierConfig::design1(CompressorTruthTable table, int threshold) {
    MultiplierConfig c;
    c.family = Family::Design1Hybrid;
    c.approx_table = std::move(table);
    c.exact_column_threshold = threshold;
    c.validate();
    return c;
}

MultiplierConfig MultiplierConfig::design2(CompressorTruthTable table, int width) {
    MultiplierConfig c;
    c.family = Family::Design2Truncated;
    c.approx_table = std::move(table);
    c.truncation_width = width;
    c.validate();
    c.compensation = derive_compensation(c);
    return c;
}

void MultiplierConfig::validate() const {
    if (truncation_width < 0 || truncation_width > 7) throw ValidationError("truncation width must be in [0, 7]");
    if (exact_column_threshold < 0 || exact_column_threshold > 14) {
        throw ValidationError("exact column threshold must be in [0, 14]");
    }
}

std::string MultiplierConfig::describe() const {
    std::ostringstream os;
    os << to_string(family);
    if (family != Family::Exact) os << "[table=" << approx_table.name();
    if (family == Family::Design1Hybrid) os << ";threshold=" << exact_column_threshold;
    if (family == Family::Design2Truncated) os << ";trunc=" << truncation_width << ";comp=" << compensation;
    if (family != Family::Exact) os << "]";
    return os.str();
}

std::string_view to_string(Reducer r) {
    switch (r) {
        case Reducer::Approx42: return "APPROX_42";
        case Reducer::Exact42: return "EXACT_42";
        case Reducer::FullAdder: return "FULL_ADDER";
        case Reducer::HalfAdder: return "HALF_ADDER";
        case Reducer::Pass: return "PASS";
    }
    return "?";
}

int input_count(Reducer r) {
    switch (r) {
        case Reducer::Approx42:
        case Reducer::Exact42: return 4;
        case Reducer::FullAdder: return 3;
        case Reducer::HalfAdder: return 2;
        case Reducer::Pass: return 1;
    }
    return 0;
}

std::string ReductionPlan::dump() const {
    std::ostringstream os;
    for (std::size_t s = 0; s < stages.size(); ++s) {
        const auto& st = stages[s];
        for (int j = 0; j < kColumns; ++j) {
            if (st.heights_in[j] == 0 && st.placements[j].empty()) continue;
            os << "stage=" << s << " col=" << j;
            int consumed = 0;
            std::size_t i = 0;
            while (i < st.placements[j].size()) {
                const Reducer r = st.placements[j][i];
                std::size_t run = 1;
                while (i + run < st.placements[j].size() && st.placements[j][i + run] == r) ++run;
                os << ' ' << to_string(r) << "(x" << run << ')';
                consumed += int(run) * input_count(r);
                i += run;
            }
            if (st.heights_in[j] > consumed) os << " PASS(x" << (st.heights_in[j] - consumed) << ')';
            os << '\n';
        }
    }
    return os.str();
}

std::size_t ReductionPlan::count(Reducer r) const {
    std::size_t n = 0;
    for (const auto& st : stages) {
        for (const auto& col : st.placements) n += std::size_t(std::count(col.begin(), col.end(), r));
    }
    return n;
}

ReductionPlan build_plan(const MultiplierConfig& cfg) {
    cfg.validate();
    ReductionPlan plan;
    plan.truncation_width = cfg.family == Family::Design2Truncated ? cfg.truncation_width : 0;
    plan.compensation = cfg.family == Family::Design2Truncated ? cfg.compensation : 0;

    std::array<int, kColumns> heights{};
    for (int j = plan.truncation_width; j < kProductColumns; ++j) {
        heights[j] = std::min(j, 2 * (kOperandBits - 1) - j) + 1;
    }
    auto done = [&] {
        return std::all_of(heights.begin(), heights.begin() + kReducibleColumns, [](int h) { return h <= 2; });
    };

    std::size_t scheduled = 0;
    while (!done()) {
        if (int(plan.stages.size()) == kMaxStages) throw std::logic_error("reduction did not converge");
        ReductionStage st;
        st.target_height = scheduled < kStageTargets.size() ? kStageTargets[scheduled++] : 2;
        st.heights_in = heights;
        std::array<int, kColumns + 1> carries{};
        std::array<int, kColumns + 1> chain{};
        for (int j = 0; j < kColumns; ++j) {
            int rem = heights[j];
            int sums = 0;
            int chain_left = chain[j];
            auto height = [&] { return rem + sums + carries[j] + chain_left; };
            while (j < kReducibleColumns && height() > st.target_height) {
                const int excess = height() - st.target_height;
                Reducer r;
                if (rem >= 4 && excess >= 3) {
                    r = is_exact_column(cfg, j) ? Reducer::Exact42 : Reducer::Approx42;
                } else if (rem >= 3 && excess >= 2) {
                    r = Reducer::FullAdder;
                } else if (rem >= 2) {
                    r = Reducer::HalfAdder;
                } else {
                    break;
                }
                rem -= input_count(r);
                ++sums;
                ++carries[j + 1];
                if (r == Reducer::Exact42) {
                    if (chain_left > 0) --chain_left;
                    ++chain[j + 1];
                }
                st.placements[j].push_back(r);
            }
            st.heights_out[j] = height();
        }
        heights = st.heights_out;
        plan.stages.push_back(std::move(st));
    }
    return plan;
}

std::uint16_t evaluate(const MultiplierConfig& cfg, const ReductionPlan& plan, std::uint8_t a, std::uint8_t b) {
    return final_addition(run_plan(cfg, plan, a, b, NoTrace{}), plan.compensation);
}

std::uint16_t evaluate(const MultiplierConfig& cfg, std::uint8_t a, std::uint8_t b) {
    return evaluate(cfg, build_plan(cfg), a, b);
}

std::array<Column, kColumns> reduce(const MultiplierConfig& cfg, const ReductionPlan& plan, std::uint8_t a,
                                    std::uint8_t b) {
    return to_columns(run_plan(cfg, plan, a, b, NoTrace{}));
}

ReductionTrace reduce_traced(const MultiplierConfig& cfg, const ReductionPlan& plan, std::uint8_t a,
                             std::uint8_t b) {
    ReductionTrace trace;
    run_plan(cfg, plan, a, b, [&](const CellEvent& e) { trace.cells.push_back(e); }, &trace.snapshots);
    return trace;
}

std::uint32_t derive_compensation(const MultiplierConfig& cfg) {
    if (cfg.family != Family::Design2Truncated) throw ValidationError("compensation applies to design2 only");
    cfg.validate();
    std::uint64_t total = 0;
    for (unsigned a = 0; a < 256; ++a) {
        for (unsigned b = 0; b < 256; ++b) {
            for (int j = 0; j < cfg.truncation_width; ++j) {
                for (int i = std::max(0, j - (kOperandBits - 1)); i <= std::min(j, kOperandBits - 1); ++i) {
                    total += std::uint64_t((a >> i) & (b >> (j - i)) & 1u) << j;
                }
            }
        }
    }
    constexpr std::uint64_t n = 1u << 16;
    return std::uint32_t((2 * total + n) / (2 * n));  // round half up
}

}  // namespace axmul
