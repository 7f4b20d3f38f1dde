#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "axmul/compressor.hpp"

namespace axmul {

inline constexpr int kOperandBits = 8;
inline constexpr int kProductColumns = 2 * kOperandBits - 1;  // 15 weighted columns
inline constexpr int kResultBits = 2 * kOperandBits;
/// Columns tracked during reduction: 16 result bits plus one overflow column.
inline constexpr int kColumns = kResultBits + 1;

/// Bits of one column of a dot diagram, in consumption order.
using Column = std::vector<std::uint8_t>;

struct PartialProductMatrix {
    std::array<Column, kProductColumns> columns;

    /// sum_j 2^j * popcount(column j)
    std::uint32_t value() const;
    std::array<int, kProductColumns> heights() const;
};

/// AND-array for 8-bit operands; column j holds a_i & b_(j-i) for ascending i.
PartialProductMatrix generate_pp(std::uint8_t a, std::uint8_t b);

enum class Family { Exact, Design1Hybrid, Design2Truncated, ProposedFullApprox };

std::string_view to_string(Family family);
/// Accepts exact, design1, design2, proposed.
Family parse_family(std::string_view name);

struct MultiplierConfig {
    Family family = Family::Exact;
    CompressorTruthTable approx_table = proposed_truth_table();
    int exact_column_threshold = 8;  // design1: exact 4:2 cells in columns >= threshold
    int truncation_width = 4;        // design2: least-significant columns dropped
    std::uint32_t compensation = 0;  // design2: constant added to the final sum

    static MultiplierConfig exact();
    static MultiplierConfig proposed(CompressorTruthTable table = proposed_truth_table());
    static MultiplierConfig design1(CompressorTruthTable table = proposed_truth_table(), int threshold = 8);
    /// Sets compensation from derive_compensation().
    static MultiplierConfig design2(CompressorTruthTable table = proposed_truth_table(), int width = 4);

    /// Throws ValidationError when a field is out of range.
    void validate() const;
    /// Stable text description, used for hashing and report labels.
    std::string describe() const;
};

enum class Reducer { Approx42, Exact42, FullAdder, HalfAdder, Pass };

std::string_view to_string(Reducer r);
int input_count(Reducer r);

/// One stage: per column, an ordered list of reducers that consume the
/// column's bits front to back. Bits left over are implied PASS.
struct ReductionStage {
    int target_height = 2;
    std::array<std::vector<Reducer>, kColumns> placements;
    /// Column heights entering this stage (before carries of this stage).
    std::array<int, kColumns> heights_in{};
    std::array<int, kColumns> heights_out{};
};

struct ReductionPlan {
    int truncation_width = 0;
    std::uint32_t compensation = 0;
    std::vector<ReductionStage> stages;

    /// Text dump: one line per stage per non-empty column, e.g.
    /// `stage=0 col=7 APPROX_42(x1) FULL_ADDER(x1) PASS(x2)` with (xN) = instance count.
    std::string dump() const;
    std::size_t count(Reducer r) const;
};

/// Stage height targets used for 8x8 reduction; further stages at target 2 are
/// appended until every column is at most two bits high.
inline constexpr std::array<int, 2> kStageTargets{3, 2};

/// Dadda-style planning. Per stage and column (LSB to MSB), with the column's
/// output height counted as remaining bits + sums produced + carries arriving
/// from column j-1: while the height exceeds the target, place a 4:2 cell when
/// the excess is at least 3 and four bits remain, else a full adder for an
/// excess of at least 2, else a half adder. Exact 4:2 cells chain cout into the
/// cin of the next column's exact cells in the same stage.
ReductionPlan build_plan(const MultiplierConfig& cfg);

/// Runs generate_pp, the plan, and an exact final addition of the two rows.
std::uint16_t evaluate(const MultiplierConfig& cfg, const ReductionPlan& plan, std::uint8_t a, std::uint8_t b);
std::uint16_t evaluate(const MultiplierConfig& cfg, std::uint8_t a, std::uint8_t b);

/// Same as evaluate() but returns the column contents after the last stage.
std::array<Column, kColumns> reduce(const MultiplierConfig& cfg, const ReductionPlan& plan,
                                           std::uint8_t a, std::uint8_t b);

/// Weighted input/output of one reducer instance during a traced run.
struct CellEvent {
    int stage;
    int column;
    Reducer kind;
    unsigned pattern;  // input bits, first consumed bit in bit 0 (cin, if any, last)
    int in_value;      // popcount of inputs incl. cin, at weight 2^column
    int out_value;     // sum + 2*carry (+ 2*cout), at weight 2^column
};

struct ReductionTrace {
    /// Column contents before stage 0, then after each stage.
    std::vector<std::array<Column, kColumns>> snapshots;
    std::vector<CellEvent> cells;
};

ReductionTrace reduce_traced(const MultiplierConfig& cfg, const ReductionPlan& plan, std::uint8_t a,
                             std::uint8_t b);

inline std::uint16_t exact_oracle(std::uint8_t a, std::uint8_t b) { return std::uint16_t(unsigned(a) * unsigned(b)); }

/// round(mean over all operand pairs of the partial-product value held in the
/// truncated columns).
std::uint32_t derive_compensation(const MultiplierConfig& cfg);

}  // namespace axmul
