#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "axmul/multiplier.hpp"

namespace axmul {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct CasePair {
    std::int64_t exact;
    std::int64_t approx;
};

inline constexpr std::int64_t kMaxExact8x8 = 255 * 255;

std::uint64_t error_distance(std::int64_t exact, std::int64_t approx);

/// ED / |exact|; 0 for (0, 0); nullopt when exact == 0 and approx != 0.
std::optional<double> relative_error_distance(std::int64_t exact, std::int64_t approx);

/// Percent of cases with exact != approx.
double error_rate(std::span<const CasePair> cases);
/// 100 * mean RED, skipping (and not counting) cases with exact == 0 != approx.
double mred(std::span<const CasePair> cases);
/// 100 * mean ED / max_exact.
double nmed(std::span<const CasePair> cases, std::int64_t max_exact);

struct ErrorReport {
    std::string design_label;
    std::uint64_t n_cases = 0;
    std::uint64_t n_errors = 0;
    std::uint64_t sum_ed = 0;               // mean_ed = sum_ed / n_cases, exactly
    long double sum_red = 0;                // over RED-included cases
    std::uint64_t n_red_cases = 0;
    std::uint64_t zero_exact_nonzero_approx = 0;
    std::uint64_t max_ed = 0;
    std::int64_t max_exact = kMaxExact8x8;
    std::map<std::uint64_t, std::uint64_t> ed_histogram;

    double er_percent() const;
    double nmed_percent() const;
    double mred_percent() const;
    double mean_ed() const;

    /// Associative merge of two partial reports over disjoint case sets.
    ErrorReport& merge(const ErrorReport& other);
};

/// Streaming accumulation of one case into a report.
void accumulate(ErrorReport& report, std::int64_t exact, std::int64_t approx);

/// All 65,536 operand pairs, evaluate() against exact_oracle(). Work is split by
/// operand row over `threads` workers (0 = AXMUL_THREADS or hardware
/// concurrency); rows are merged in order so results do not depend on it.
ErrorReport exhaustive_sweep(const MultiplierConfig& cfg, unsigned threads = 0);

using ProductLut = std::vector<std::uint16_t>;
inline constexpr std::size_t kLutSize = 1u << 16;

inline std::size_t lut_index(std::uint8_t a, std::uint8_t b) { return std::size_t(a) << 8 | b; }

/// lut[(a << 8) | b] = evaluate(cfg, a, b)
ProductLut build_product_lut(const MultiplierConfig& cfg, unsigned threads = 0);

/// Fixed 65,536 x little-endian uint16, no header.
void write_lut(const ProductLut& lut, const std::string& path);
ProductLut read_lut(const std::string& path);

/// `design,er,nmed,mred,max_ed,mean_ed` header plus one row; 3-decimal percents.
std::string report_csv_header();
std::string report_csv_row(const ErrorReport& r);
/// Aligned text table: Design, ER (%), NMED (%), MRED (%).
std::string report_table(std::span<const ErrorReport> reports);
/// `ed,count` rows in ascending ED.
std::string histogram_csv(const ErrorReport& r);

unsigned resolve_threads(unsigned requested);

}  // namespace axmul
