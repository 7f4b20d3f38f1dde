#include <doctest.h>

#include <bit>

#include "axmul/multiplier.hpp"
#include "support.hpp"

using namespace axmul;

namespace {

/// E[partial-product value of columns < w] for uniform operands: column j has
/// j+1 bits, each set with probability 1/4. Rounded half up.
std::uint32_t closed_form_compensation(int w) {
    std::uint64_t quarter_units = 0;
    for (int j = 0; j < w; ++j) quarter_units += (std::uint64_t(1) << j) * std::uint64_t(j + 1);
    return std::uint32_t((quarter_units * 2 + 4) / 8);
}

template <typename F>
void for_all_pairs(F&& f) {
    for (unsigned a = 0; a < 256; ++a)
        for (unsigned b = 0; b < 256; ++b) f(std::uint8_t(a), std::uint8_t(b));
}

}  // namespace

TEST_SUITE("multiplier") {

TEST_CASE("partial product matrix") {
    const auto m = generate_pp(0xFF, 0xFF);
    for (int j = 0; j < kProductColumns; ++j) CHECK(m.heights()[j] == std::min(j, 14 - j) + 1);
    CHECK(m.value() == 255u * 255u);
    CHECK(generate_pp(0, 0xFF).value() == 0);
    const auto one = generate_pp(1, 0xA5);
    CHECK(one.value() == 0xA5);
    for_all_pairs([](std::uint8_t a, std::uint8_t b) {
        if ((a * 7 + b) % 97 == 0) CHECK(generate_pp(a, b).value() == unsigned(a) * b);
    });
}

TEST_CASE("exact family equals the integer product everywhere") {
    const auto cfg = MultiplierConfig::exact();
    const auto plan = build_plan(cfg);
    std::size_t mismatches = 0;
    for_all_pairs([&](std::uint8_t a, std::uint8_t b) { mismatches += evaluate(cfg, plan, a, b) != unsigned(a) * b; });
    CHECK(mismatches == 0);
}

TEST_CASE("every plan ends with at most two bits per column") {
    for (const auto& cfg : {MultiplierConfig::exact(), MultiplierConfig::proposed(), MultiplierConfig::design1(),
                            MultiplierConfig::design2()}) {
        CAPTURE(cfg.describe());
        const auto plan = build_plan(cfg);
        REQUIRE_FALSE(plan.stages.empty());
        for (int h : plan.stages.back().heights_out) CHECK(h <= 2);
        const auto cols = reduce(cfg, plan, 0xFF, 0xFF);
        for (const auto& c : cols) CHECK(c.size() <= 2);
    }
}

TEST_CASE("proposed plan golden") {
    const auto plan = build_plan(MultiplierConfig::proposed());
    CHECK(plan.dump() == testing::golden("proposed_plan.txt"));
    CHECK(plan.stages.size() == kStageTargets.size());
    CHECK(plan.count(Reducer::Exact42) == 0);
    CHECK(build_plan(MultiplierConfig::proposed()).dump() == plan.dump());
}

TEST_CASE("design1 plan golden and column split") {
    const auto cfg = MultiplierConfig::design1();
    const auto plan = build_plan(cfg);
    CHECK(plan.dump() == testing::golden("design1_plan.txt"));
    for (const auto& st : plan.stages) {
        for (int j = 0; j < kColumns; ++j) {
            for (Reducer r : st.placements[j]) {
                if (r == Reducer::Approx42) CHECK(j < cfg.exact_column_threshold);
                if (r == Reducer::Exact42) CHECK(j >= cfg.exact_column_threshold);
            }
        }
    }
}

TEST_CASE("golden products") {
    const auto p = MultiplierConfig::proposed();
    CHECK(evaluate(p, 255, 255) == 61393);
    CHECK(evaluate(MultiplierConfig::exact(), 255, 255) == 65025);
    CHECK(evaluate(p, 0, 0) == 0);
}

TEST_CASE("proposed is one-sided with identity rows") {
    const auto cfg = MultiplierConfig::proposed();
    const auto plan = build_plan(cfg);
    for_all_pairs([&](std::uint8_t a, std::uint8_t b) {
        const unsigned v = evaluate(cfg, plan, a, b);
        if (v > unsigned(a) * b) FAIL_CHECK("over-estimate at " << int(a) << "x" << int(b));
        if (a <= 1 && v != unsigned(a) * b) FAIL_CHECK("identity broken at " << int(a) << "x" << int(b));
    });
}

TEST_CASE("reduction conserves bits except at approximate 1111 cells") {
    for (const auto& cfg : {MultiplierConfig::proposed(), MultiplierConfig::design1()}) {
        const auto plan = build_plan(cfg);
        for (auto [a, b] : {std::pair{255, 255}, {170, 85}, {200, 13}, {99, 254}, {128, 128}}) {
            const auto trace = reduce_traced(cfg, plan, std::uint8_t(a), std::uint8_t(b));
            std::int64_t loss = 0;
            for (const auto& c : trace.cells) {
                const int expected = c.kind == Reducer::Approx42 && c.pattern == 0xF ? -1 : 0;
                CHECK(c.out_value - c.in_value == expected);
                CHECK(c.in_value == std::popcount(c.pattern));
                loss += std::int64_t(c.out_value - c.in_value) << c.column;
            }
            CHECK(trace.snapshots.size() == plan.stages.size() + 1);
            CHECK(std::int64_t(evaluate(cfg, plan, std::uint8_t(a), std::uint8_t(b))) - a * b == loss);
        }
    }
}

TEST_CASE("hybrid threshold extremes") {
    const auto all_exact = MultiplierConfig::design1(proposed_truth_table(), 0);
    const auto none_exact = MultiplierConfig::design1(proposed_truth_table(), 14);
    const auto proposed = MultiplierConfig::proposed();
    const auto p0 = build_plan(all_exact), p14 = build_plan(none_exact), pp = build_plan(proposed);
    CHECK(p0.count(Reducer::Approx42) == 0);
    std::size_t diff0 = 0, diff14 = 0;
    for_all_pairs([&](std::uint8_t a, std::uint8_t b) {
        diff0 += evaluate(all_exact, p0, a, b) != unsigned(a) * b;
        diff14 += evaluate(none_exact, p14, a, b) != evaluate(proposed, pp, a, b);
    });
    CHECK(diff0 == 0);
    CHECK(diff14 == 0);
}

TEST_CASE("compensation matches the closed-form expectation") {
    CHECK(closed_form_compensation(4) == 12);
    for (int w = 0; w <= 7; ++w) {
        CAPTURE(w);
        CHECK(MultiplierConfig::design2(proposed_truth_table(), w).compensation == closed_form_compensation(w));
    }
    CHECK(MultiplierConfig::design2().compensation == 12);
    CHECK(MultiplierConfig::design2(proposed_truth_table(), 1).compensation == 0);
    CHECK_THROWS_AS(derive_compensation(MultiplierConfig::proposed()), ValidationError);
}

TEST_CASE("design2 drops the truncated columns") {
    const auto cfg = MultiplierConfig::design2();
    const auto plan = build_plan(cfg);
    CHECK(plan.truncation_width == 4);
    CHECK(plan.compensation == 12);
    const auto trace = reduce_traced(cfg, plan, 255, 255);
    for (int j = 0; j < 4; ++j) CHECK(trace.snapshots.front()[j].empty());
    CHECK(evaluate(cfg, plan, 0, 0) == 12);
}

TEST_CASE("configuration validation") {
    CHECK_THROWS_AS(MultiplierConfig::design1(proposed_truth_table(), -1), ValidationError);
    CHECK_THROWS_AS(MultiplierConfig::design1(proposed_truth_table(), 15), ValidationError);
    CHECK_THROWS_AS(MultiplierConfig::design2(proposed_truth_table(), 8), ValidationError);
    CHECK(parse_family("design2") == Family::Design2Truncated);
    CHECK_THROWS_AS(parse_family("design3"), ValidationError);
    CHECK(MultiplierConfig::design2().describe() == "design2[table=proposed;trunc=4;comp=12]");
    CHECK(MultiplierConfig::exact().describe() == "exact");
}

TEST_CASE("custom tables change the result") {
    const auto worse = table_from_error_pattern(parse_error_pattern("0011,0101,0110,1111"));
    const auto cfg = MultiplierConfig::proposed(worse);
    std::size_t over = 0;
    for_all_pairs([&](std::uint8_t a, std::uint8_t b) { over += evaluate(cfg, a, b) > unsigned(a) * b; });
    CHECK(over > 0);
}

}
