#include "axmul/compressor.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <vector>

namespace axmul {

namespace {

CompressorOutputs encode(int value) {
    return CompressorOutputs{false, (value & 2) != 0, (value & 1) != 0};
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    size_t start = 0;
    for (;;) {
        size_t pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

bool parse_bit(std::string_view s) {
    s = trim(s);
    if (s == "0") return false;
    if (s == "1") return true;
    throw ValidationError("expected bit, got '" + std::string(s) + "'");
}

}  // namespace

CompressorInputs CompressorInputs::from_index(unsigned pattern, bool cin) {
    return CompressorInputs{(pattern & 1u) != 0, (pattern & 2u) != 0, (pattern & 4u) != 0,
                            (pattern & 8u) != 0, cin};
}

unsigned CompressorInputs::index() const {
    return unsigned(x1) | unsigned(x2) << 1 | unsigned(x3) << 2 | unsigned(x4) << 3;
}

CompressorOutputs exact_compressor(const CompressorInputs& in) {
    const int fa1 = int(in.x1) + int(in.x2) + int(in.x3);
    const bool s1 = fa1 & 1;
    const int fa2 = int(s1) + int(in.x4) + int(in.cin);
    return CompressorOutputs{fa1 >= 2, fa2 >= 2, (fa2 & 1) != 0};
}

CompressorTruthTable::CompressorTruthTable(std::string name,
                                           const std::array<CompressorOutputs, kRows>& entries)
    : name_(std::move(name)), entries_(entries) {
    for (const auto& e : entries_) {
        if (e.cout) throw ValidationError("two-output compressor table cannot carry cout");
    }
}

int CompressorTruthTable::value_error(unsigned pattern) const {
    return value(pattern) - std::popcount(pattern);
}

unsigned CompressorTruthTable::error_combinations() const {
    unsigned n = 0;
    for (unsigned p = 0; p < kRows; ++p) n += is_error(p) ? 1 : 0;
    return n;
}

unsigned CompressorTruthTable::occurrence_weight(unsigned pattern) {
    unsigned w = 1;
    for (int zeros = 4 - std::popcount(pattern & 0xFu); zeros > 0; --zeros) w *= 3;
    return w;
}

unsigned CompressorTruthTable::error_weight() const {
    unsigned w = 0;
    for (unsigned p = 0; p < kRows; ++p) {
        if (is_error(p)) w += occurrence_weight(p);
    }
    return w;
}

std::string CompressorTruthTable::to_csv() const {
    std::ostringstream os;
    os << "x4,x3,x2,x1,carry,sum\n";
    for (unsigned p = 0; p < kRows; ++p) {
        os << ((p >> 3) & 1) << ',' << ((p >> 2) & 1) << ',' << ((p >> 1) & 1) << ',' << (p & 1) << ','
           << int(entries_[p].carry) << ',' << int(entries_[p].sum) << '\n';
    }
    return os.str();
}

CompressorTruthTable CompressorTruthTable::from_csv(std::string_view text, std::string name) {
    std::array<CompressorOutputs, kRows> entries{};
    std::array<bool, kRows> seen{};
    bool header = false;
    unsigned rows = 0;
    for (auto line : split(text, '\n')) {
        line = trim(line);
        if (line.empty()) continue;
        if (!header) {
            if (line != "x4,x3,x2,x1,carry,sum") throw ValidationError("bad truth-table header");
            header = true;
            continue;
        }
        auto f = split(line, ',');
        if (f.size() != 6) throw ValidationError("truth-table row needs 6 fields");
        unsigned p = unsigned(parse_bit(f[0])) << 3 | unsigned(parse_bit(f[1])) << 2 |
                     unsigned(parse_bit(f[2])) << 1 | unsigned(parse_bit(f[3]));
        if (seen[p]) throw ValidationError("duplicate truth-table row");
        seen[p] = true;
        entries[p] = CompressorOutputs{false, parse_bit(f[4]), parse_bit(f[5])};
        ++rows;
    }
    if (!header) throw ValidationError("missing truth-table header");
    if (rows != kRows) throw ValidationError("truth table needs 16 rows");
    return CompressorTruthTable(std::move(name), entries);
}

CompressorTruthTable saturating_exact_table() {
    std::array<CompressorOutputs, CompressorTruthTable::kRows> e{};
    for (unsigned p = 0; p < CompressorTruthTable::kRows; ++p) e[p] = encode(std::min(std::popcount(p), 3));
    return CompressorTruthTable("saturating", e);
}

CompressorTruthTable proposed_truth_table() {
    // Rows in (x4 x3 x2 x1) order; only 1111 deviates (value 3 instead of 4).
    static constexpr std::array<std::array<int, 2>, 16> rows{{
        {0, 0}, {0, 1}, {0, 1}, {1, 0}, {0, 1}, {1, 0}, {1, 0}, {1, 1},
        {0, 1}, {1, 0}, {1, 0}, {1, 1}, {1, 0}, {1, 1}, {1, 1}, {1, 1},
    }};
    std::array<CompressorOutputs, CompressorTruthTable::kRows> e{};
    for (unsigned p = 0; p < rows.size(); ++p) e[p] = CompressorOutputs{false, rows[p][0] != 0, rows[p][1] != 0};
    return CompressorTruthTable("proposed", e);
}

CompressorTruthTable table_from_error_pattern(const ErrorPattern& errors, std::string name) {
    if (!errors.contains(0xF)) {
        throw ValidationError("pattern 1111 (value 4) must be listed as an error index");
    }
    auto e = saturating_exact_table().entries();
    for (const auto& [p, out] : errors) {
        if (p >= CompressorTruthTable::kRows) throw ValidationError("error index out of range");
        if (out && out->cout) throw ValidationError("override cannot set cout");
        e[p] = out ? *out : encode(3);
        if (e[p].value() == std::popcount(p)) {
            throw ValidationError("error index " + std::to_string(p) + " produces the exact value");
        }
    }
    return CompressorTruthTable(std::move(name), e);
}

ErrorPattern parse_error_pattern(std::string_view spec) {
    ErrorPattern out;
    for (auto item : split(spec, ',')) {
        item = trim(item);
        if (item.empty()) throw ValidationError("empty error index");
        auto eq = item.find('=');
        auto bits = item.substr(0, eq);
        if (bits.size() != 4) throw ValidationError("error index must be 4 bits (x4x3x2x1)");
        unsigned p = 0;
        for (char c : bits) {
            if (c != '0' && c != '1') throw ValidationError("error index must be binary");
            p = p << 1 | unsigned(c - '0');
        }
        std::optional<CompressorOutputs> override;
        if (eq != std::string_view::npos) {
            auto cs = item.substr(eq + 1);
            if (cs.size() != 2) throw ValidationError("override must be <carry><sum>");
            override = CompressorOutputs{false, parse_bit(cs.substr(0, 1)), parse_bit(cs.substr(1, 1))};
        }
        if (!out.emplace(p, override).second) throw ValidationError("duplicate error index");
    }
    return out;
}

}  // namespace axmul
