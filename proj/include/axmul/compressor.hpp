#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace axmul {

/// Raised when a truth table or error pattern is internally inconsistent.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Four same-weight input bits, plus the carry-in used only by the exact 5-input cell.
struct CompressorInputs {
    bool x1 = false, x2 = false, x3 = false, x4 = false;
    bool cin = false;

    /// Pattern index read as (x4 x3 x2 x1).
    static CompressorInputs from_index(unsigned pattern, bool cin = false);
    unsigned index() const;
};

struct CompressorOutputs {
    bool cout = false;  // exact model only
    bool carry = false; // weight 2^(n+1)
    bool sum = false;   // weight 2^n

    int value() const { return 2 * int(cout) + 2 * int(carry) + int(sum); }
    friend bool operator==(const CompressorOutputs&, const CompressorOutputs&) = default;
};

/// Exact 4:2 compressor built from two cascaded full adders:
/// FA1(x1, x2, x3) -> (s1, cout), FA2(s1, x4, cin) -> (sum, carry).
CompressorOutputs exact_compressor(const CompressorInputs& in);

/// Behavioral map from a 4-bit input pattern to (carry, sum).
class CompressorTruthTable {
public:
    static constexpr unsigned kRows = 16;

    CompressorTruthTable() = default;
    CompressorTruthTable(std::string name, const std::array<CompressorOutputs, kRows>& entries);

    const std::string& name() const { return name_; }
    const CompressorOutputs& operator[](unsigned pattern) const { return entries_.at(pattern); }
    const std::array<CompressorOutputs, kRows>& entries() const { return entries_; }

    int value(unsigned pattern) const { return entries_.at(pattern).value(); }
    /// approx value - popcount(pattern)
    int value_error(unsigned pattern) const;
    bool is_error(unsigned pattern) const { return value_error(pattern) != 0; }
    unsigned error_combinations() const;

    /// Occurrence weight of a row out of 256 when each input bit is an
    /// AND of two uniform bits (P(1) = 1/4): 3^(number of zero inputs).
    static unsigned occurrence_weight(unsigned pattern);
    /// Sum of occurrence weights over error rows, i.e. the numerator of P(k/256).
    unsigned error_weight() const;

    /// 16 data rows under the header `x4,x3,x2,x1,carry,sum`.
    std::string to_csv() const;
    static CompressorTruthTable from_csv(std::string_view text, std::string name = "csv");

    friend bool operator==(const CompressorTruthTable& a, const CompressorTruthTable& b) {
        return a.entries_ == b.entries_;
    }

private:
    std::string name_;
    std::array<CompressorOutputs, kRows> entries_{};
};

/// Two-output table that is exact wherever representable, saturating 1111 to 3.
CompressorTruthTable saturating_exact_table();

/// The single-error compressor: exact on 15 rows, 1111 -> (1, 1).
CompressorTruthTable proposed_truth_table();

/// Error indices with their outputs; std::nullopt selects the saturate policy
/// (carry = sum = 1), otherwise the given (carry, sum) overrides the row.
using ErrorPattern = std::map<unsigned, std::optional<CompressorOutputs>>;

/// Builds a table that is exact except at the listed indices. Throws
/// ValidationError if 1111 is not listed, an index is out of range, or a listed
/// index ends up producing the exact value.
CompressorTruthTable table_from_error_pattern(const ErrorPattern& errors, std::string name = "pattern");

/// Parses `0011,1111=10,...` (bit strings x4x3x2x1, optional `=<carry><sum>`).
ErrorPattern parse_error_pattern(std::string_view spec);

}  // namespace axmul
