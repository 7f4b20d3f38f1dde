#include "axmul/metrics.hpp"

#include <algorithm>
#include <cstdlib>
#include <fmt/format.h>
#include <thread>

#include "axmul/io.hpp"

namespace axmul {

std::uint64_t error_distance(std::int64_t exact, std::int64_t approx) {
    return exact >= approx ? std::uint64_t(exact - approx) : std::uint64_t(approx - exact);
}

std::optional<double> relative_error_distance(std::int64_t exact, std::int64_t approx) {
    const auto ed = error_distance(exact, approx);
    if (exact == 0) {
        if (ed == 0) return 0.0;
        return std::nullopt;
    }
    return double(ed) / double(exact < 0 ? -exact : exact);
}

double error_rate(std::span<const CasePair> cases) {
    if (cases.empty()) throw DomainError("error rate of an empty case set");
    const auto errors = std::count_if(cases.begin(), cases.end(), [](const CasePair& c) { return c.exact != c.approx; });
    return 100.0 * double(errors) / double(cases.size());
}

double mred(std::span<const CasePair> cases) {
    if (cases.empty()) throw DomainError("MRED of an empty case set");
    long double sum = 0;
    std::size_t n = 0;
    for (const auto& c : cases) {
        if (auto red = relative_error_distance(c.exact, c.approx)) {
            sum += *red;
            ++n;
        }
    }
    if (n == 0) throw DomainError("MRED undefined: every case has a zero exact output");
    return double(100.0L * sum / n);
}

double nmed(std::span<const CasePair> cases, std::int64_t max_exact) {
    if (max_exact <= 0) throw DomainError("NMED needs a positive maximum exact output");
    if (cases.empty()) throw DomainError("NMED of an empty case set");
    std::uint64_t sum = 0;
    for (const auto& c : cases) sum += error_distance(c.exact, c.approx);
    return 100.0 * double(sum) / double(cases.size()) / double(max_exact);
}

double ErrorReport::er_percent() const { return n_cases ? 100.0 * double(n_errors) / double(n_cases) : 0.0; }

double ErrorReport::mean_ed() const { return n_cases ? double(sum_ed) / double(n_cases) : 0.0; }

double ErrorReport::nmed_percent() const { return 100.0 * mean_ed() / double(max_exact); }

double ErrorReport::mred_percent() const { return n_red_cases ? double(100.0L * sum_red / n_red_cases) : 0.0; }

ErrorReport& ErrorReport::merge(const ErrorReport& other) {
    n_cases += other.n_cases;
    n_errors += other.n_errors;
    sum_ed += other.sum_ed;
    sum_red += other.sum_red;
    n_red_cases += other.n_red_cases;
    zero_exact_nonzero_approx += other.zero_exact_nonzero_approx;
    max_ed = std::max(max_ed, other.max_ed);
    for (const auto& [ed, count] : other.ed_histogram) ed_histogram[ed] += count;
    return *this;
}

void accumulate(ErrorReport& report, std::int64_t exact, std::int64_t approx) {
    const auto ed = error_distance(exact, approx);
    ++report.n_cases;
    report.sum_ed += ed;
    report.max_ed = std::max(report.max_ed, ed);
    ++report.ed_histogram[ed];
    if (ed != 0) ++report.n_errors;
    if (auto red = relative_error_distance(exact, approx)) {
        report.sum_red += *red;
        ++report.n_red_cases;
    } else {
        ++report.zero_exact_nonzero_approx;
    }
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("AXMUL_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return unsigned(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

/// Runs fn(a) for every operand row a in [0, 256) across worker threads.
template <typename Fn>
void for_each_row(unsigned threads, Fn&& fn) {
    threads = std::min(resolve_threads(threads), 256u);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (unsigned a = t; a < 256; a += threads) fn(a);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

ErrorReport exhaustive_sweep(const MultiplierConfig& cfg, unsigned threads) {
    const ReductionPlan plan = build_plan(cfg);
    std::vector<ErrorReport> rows(256);
    for_each_row(threads, [&](unsigned a) {
        ErrorReport& r = rows[a];
        for (unsigned b = 0; b < 256; ++b) {
            accumulate(r, exact_oracle(std::uint8_t(a), std::uint8_t(b)),
                       evaluate(cfg, plan, std::uint8_t(a), std::uint8_t(b)));
        }
    });
    ErrorReport report;
    report.design_label = cfg.describe();
    for (const auto& r : rows) report.merge(r);
    return report;
}

ProductLut build_product_lut(const MultiplierConfig& cfg, unsigned threads) {
    const ReductionPlan plan = build_plan(cfg);
    ProductLut lut(kLutSize);
    for_each_row(threads, [&](unsigned a) {
        for (unsigned b = 0; b < 256; ++b) {
            lut[lut_index(std::uint8_t(a), std::uint8_t(b))] = evaluate(cfg, plan, std::uint8_t(a), std::uint8_t(b));
        }
    });
    return lut;
}

void write_lut(const ProductLut& lut, const std::string& path) {
    if (lut.size() != kLutSize) throw DomainError("product table must have 65536 entries");
    std::string bytes(kLutSize * 2, '\0');
    for (std::size_t i = 0; i < kLutSize; ++i) {
        bytes[2 * i] = char(lut[i] & 0xFF);
        bytes[2 * i + 1] = char(lut[i] >> 8);
    }
    write_file_atomic(path, bytes);
}

ProductLut read_lut(const std::string& path) {
    const std::string bytes = read_file(path);
    if (bytes.size() != kLutSize * 2) {
        throw DomainError(fmt::format("{}: expected {} bytes, got {}", path, kLutSize * 2, bytes.size()));
    }
    ProductLut lut(kLutSize);
    for (std::size_t i = 0; i < kLutSize; ++i) {
        lut[i] = std::uint16_t(std::uint8_t(bytes[2 * i]) | std::uint8_t(bytes[2 * i + 1]) << 8);
    }
    return lut;
}

std::string report_csv_header() { return "design,er,nmed,mred,max_ed,mean_ed\n"; }

std::string report_csv_row(const ErrorReport& r) {
    return fmt::format("{},{:.3f},{:.3f},{:.3f},{},{:.6f}\n", r.design_label, r.er_percent(), r.nmed_percent(),
                       r.mred_percent(), r.max_ed, r.mean_ed());
}

std::string report_table(std::span<const ErrorReport> reports) {
    std::size_t width = 6;
    for (const auto& r : reports) width = std::max(width, r.design_label.size());
    std::string out = fmt::format("{:<{}}  {:>8}  {:>8}  {:>8}\n", "Design", width, "ER (%)", "NMED (%)", "MRED (%)");
    for (const auto& r : reports) {
        out += fmt::format("{:<{}}  {:>8.3f}  {:>8.3f}  {:>8.3f}\n", r.design_label, width, r.er_percent(),
                           r.nmed_percent(), r.mred_percent());
    }
    return out;
}

std::string histogram_csv(const ErrorReport& r) {
    std::string out = "ed,count\n";
    for (const auto& [ed, count] : r.ed_histogram) out += fmt::format("{},{}\n", ed, count);
    return out;
}

}  // namespace axmul
