#include <doctest.h>

#include <algorithm>
#include <bit>

#include "axmul/netlist.hpp"

using namespace axmul;

TEST_SUITE("netlist") {

TEST_CASE("proposed netlist reproduces the truth table") {
    const auto n = proposed_netlist();
    const auto t = proposed_truth_table();
    for (unsigned p = 0; p < 16; ++p) {
        const auto r = simulate_netlist(n, p);
        CAPTURE(p);
        CHECK(r.carry == t[p].carry);
        CHECK(r.sum == t[p].sum);
        CHECK(r.value() == (p == 0xF ? 3 : std::popcount(p)));
    }
}

TEST_CASE("proposed critical path") {
    const auto cp = critical_path(proposed_netlist());
    CHECK(cp.stages == 5);
    REQUIRE(cp.gates.size() == 5);
    auto sorted = cp.gates;
    std::sort(sorted.begin(), sorted.end());
    std::vector<GateKind> expected{GateKind::NOR2, GateKind::NAND2, GateKind::INV, GateKind::INV, GateKind::AO222};
    std::sort(expected.begin(), expected.end());
    CHECK(sorted == expected);
    CHECK(cp.gates.back() == GateKind::AO222);
    CHECK(cp.output == "sum");
    CHECK(cp.nodes.size() == cp.gates.size());
}

TEST_CASE("exact netlist matches the behavioural model") {
    const auto n = exact_compressor_netlist();
    for (unsigned p = 0; p < 16; ++p) {
        for (bool cin : {false, true}) {
            CHECK(simulate_netlist(n, p, cin) == exact_compressor(CompressorInputs::from_index(p, cin)));
        }
    }
}

TEST_CASE("exact netlist is strictly deeper") {
    CHECK(critical_path(exact_compressor_netlist()).stages > critical_path(proposed_netlist()).stages);
}

TEST_CASE("gate evaluation") {
    GateNetlist n;
    const NodeId a = n.add_input("a");
    const NodeId b = n.add_input("b");
    const NodeId c = n.add_input("c");
    n.add_output("inv", n.add_gate(GateKind::INV, {a}));
    n.add_output("buf", n.add_gate(GateKind::BUF, {a}));
    n.add_output("nand", n.add_gate(GateKind::NAND2, {a, b}));
    n.add_output("nor", n.add_gate(GateKind::NOR2, {a, b}));
    n.add_output("and", n.add_gate(GateKind::AND2, {a, b}));
    n.add_output("or", n.add_gate(GateKind::OR2, {a, b}));
    n.add_output("xor", n.add_gate(GateKind::XOR2, {a, b}));
    n.add_output("ao", n.add_gate(GateKind::AO222, {a, b, b, c, a, c}));
    for (unsigned m = 0; m < 8; ++m) {
        const bool va = m & 1, vb = m & 2, vc = m & 4;
        const bool in[3] = {va, vb, vc};
        const auto v = n.evaluate(in);
        CHECK(v[n.output("inv")] == !va);
        CHECK(v[n.output("buf")] == va);
        CHECK(v[n.output("nand")] == !(va && vb));
        CHECK(v[n.output("nor")] == !(va || vb));
        CHECK(v[n.output("and")] == (va && vb));
        CHECK(v[n.output("or")] == (va || vb));
        CHECK(v[n.output("xor")] == (va != vb));
        CHECK(v[n.output("ao")] == ((va && vb) || (vb && vc) || (va && vc)));
    }
}

TEST_CASE("structural errors") {
    SUBCASE("cycle") {
        GateNetlist n;
        n.add_input("a");
        n.add_gate(GateKind::INV, {2});
        n.add_gate(GateKind::INV, {1});
        CHECK_THROWS_AS(n.validate(), StructuralError);
        CHECK_THROWS_AS(n.topological_order(), StructuralError);
    }
    SUBCASE("unresolved input") {
        GateNetlist n;
        n.add_input("a");
        n.add_gate(GateKind::INV, {7});
        CHECK_THROWS_AS(n.validate(), StructuralError);
    }
    SUBCASE("wrong fan-in") {
        GateNetlist n;
        const NodeId a = n.add_input("a");
        n.add_gate(GateKind::NAND2, {a});
        CHECK_THROWS_AS(n.validate(), StructuralError);
    }
    SUBCASE("unknown output") { CHECK_THROWS_AS(proposed_netlist().output("cout"), StructuralError); }
}

TEST_CASE("topological order is deterministic and respects edges") {
    const auto n = proposed_netlist();
    const auto order = n.topological_order();
    CHECK(order == proposed_netlist().topological_order());
    CHECK(order.size() == n.gates().size());
    std::vector<std::size_t> pos(n.node_count(), 0);
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i + 1;
    for (const auto& g : n.gates()) {
        REQUIRE(pos[g.id] > 0);
        for (NodeId in : g.inputs) CHECK(pos[in] < pos[g.id]);
    }
}

}
