#include <doctest.h>

#include <cmath>
#include <vector>

#include "axmul/metrics.hpp"
#include "support.hpp"

using namespace axmul;

TEST_SUITE("metrics") {

TEST_CASE("error distance and relative error distance") {
    CHECK(error_distance(100, 97) == 3);
    CHECK(error_distance(97, 100) == 3);
    CHECK(*relative_error_distance(100, 97) == doctest::Approx(0.03));
    CHECK(*relative_error_distance(0, 0) == 0.0);
    CHECK_FALSE(relative_error_distance(0, 5).has_value());
}

TEST_CASE("span metrics on a small case set") {
    const std::vector<CasePair> cases{{10, 10}, {10, 9}, {0, 0}, {0, 4}, {20, 25}};
    CHECK(error_rate(cases) == doctest::Approx(60.0));
    // RED over the four defined cases: 0, 0.1, 0, 0.25
    CHECK(mred(cases) == doctest::Approx(100.0 * 0.35 / 4));
    CHECK(nmed(cases, 100) == doctest::Approx(100.0 * (0 + 1 + 0 + 4 + 5) / 5.0 / 100.0));
    CHECK_THROWS_AS(error_rate(std::vector<CasePair>{}), DomainError);
    CHECK_THROWS_AS(mred(std::vector<CasePair>{{0, 1}}), DomainError);
    CHECK_THROWS_AS(nmed(cases, 0), DomainError);
}

TEST_CASE("streaming report agrees with the span functions") {
    const std::vector<CasePair> cases{{10, 10}, {10, 9}, {0, 0}, {0, 4}, {20, 25}};
    ErrorReport r;
    r.max_exact = 100;
    for (const auto& c : cases) accumulate(r, c.exact, c.approx);
    CHECK(r.n_cases == 5);
    CHECK(r.zero_exact_nonzero_approx == 1);
    CHECK(r.er_percent() == doctest::Approx(error_rate(cases)));
    CHECK(r.mred_percent() == doctest::Approx(mred(cases)));
    CHECK(r.nmed_percent() == doctest::Approx(nmed(cases, 100)));
    CHECK(r.max_ed == 5);
    CHECK(r.ed_histogram.at(0) == 2);

    ErrorReport a, b;
    a.max_exact = b.max_exact = 100;
    for (std::size_t i = 0; i < cases.size(); ++i) accumulate(i < 2 ? a : b, cases[i].exact, cases[i].approx);
    a.merge(b);
    CHECK(report_csv_row(a) == report_csv_row(r));
    CHECK(histogram_csv(a) == histogram_csv(r));
}

TEST_CASE("exhaustive sweep agrees with a direct computation") {
    const auto cfg = MultiplierConfig::proposed();
    const auto lut = build_product_lut(cfg, 2);
    double n_err = 0, sum_ed = 0, sum_red = 0;
    for (unsigned a = 0; a < 256; ++a) {
        for (unsigned b = 0; b < 256; ++b) {
            const double exact = a * b, approx = lut[lut_index(std::uint8_t(a), std::uint8_t(b))];
            n_err += exact != approx;
            sum_ed += std::fabs(exact - approx);
            sum_red += exact == 0 ? 0.0 : std::fabs(exact - approx) / exact;
        }
    }
    const auto r = exhaustive_sweep(cfg, 3);
    CHECK(r.n_cases == 65536);
    CHECK(r.er_percent() == doctest::Approx(100.0 * n_err / 65536));
    CHECK(r.nmed_percent() == doctest::Approx(100.0 * sum_ed / 65536 / 65025.0));
    CHECK(r.mred_percent() == doctest::Approx(100.0 * sum_red / 65536));
    CHECK(r.max_ed == 3632);
    CHECK(r.mean_ed() == doctest::Approx(29.742188));
}

TEST_CASE("sweep does not depend on the thread count") {
    const auto cfg = MultiplierConfig::design1();
    const auto one = exhaustive_sweep(cfg, 1), many = exhaustive_sweep(cfg, 7);
    CHECK(report_csv_row(one) == report_csv_row(many));
    CHECK(histogram_csv(one) == histogram_csv(many));
}

TEST_CASE("design2 tallies zero-exact cases") {
    const auto r = exhaustive_sweep(MultiplierConfig::design2(), 4);
    CHECK(r.zero_exact_nonzero_approx == 511);
    CHECK(r.n_red_cases == 65536 - 511);
}

TEST_CASE("report formatting") {
    const auto r = exhaustive_sweep(MultiplierConfig::exact(), 2);
    CHECK(report_csv_header() == "design,er,nmed,mred,max_ed,mean_ed\n");
    CHECK(report_csv_row(r) == "exact,0.000,0.000,0.000,0,0.000000\n");
    CHECK(histogram_csv(r) == "ed,count\n0,65536\n");
    const auto table = report_table(std::span<const ErrorReport>(&r, 1));
    CHECK(table.find("ER (%)") != std::string::npos);
    CHECK(table.find("exact") != std::string::npos);
}

TEST_CASE("lut file round trip") {
    testing::TempDir dir("lut");
    const auto lut = build_product_lut(MultiplierConfig::proposed(), 2);
    CHECK(lut[lut_index(255, 255)] == 61393);
    write_lut(lut, dir.file("p.lut"));
    const std::string bytes = read_file(dir.file("p.lut"));
    REQUIRE(bytes.size() == 131072);
    const std::size_t i = lut_index(255, 255);
    CHECK(std::uint8_t(bytes[2 * i]) == (61393 & 0xFF));
    CHECK(std::uint8_t(bytes[2 * i + 1]) == (61393 >> 8));
    CHECK(read_lut(dir.file("p.lut")) == lut);
    write_file_atomic(dir.file("short.lut"), "abc");
    CHECK_THROWS_AS(read_lut(dir.file("short.lut")), DomainError);
}

TEST_CASE("thread resolution") {
    CHECK(resolve_threads(3) == 3);
    CHECK(resolve_threads(0) >= 1);
}

}
