#include "axmul/netlist.hpp"

#include <algorithm>
#include <limits>

namespace axmul {

namespace {
constexpr std::size_t kNoGate = std::numeric_limits<std::size_t>::max();
}

std::string_view to_string(GateKind kind) {
    switch (kind) {
        case GateKind::INV: return "INV";
        case GateKind::BUF: return "BUF";
        case GateKind::NAND2: return "NAND2";
        case GateKind::NOR2: return "NOR2";
        case GateKind::AND2: return "AND2";
        case GateKind::OR2: return "OR2";
        case GateKind::XOR2: return "XOR2";
        case GateKind::AO222: return "AO222";
    }
    return "?";
}

std::size_t fan_in(GateKind kind) {
    switch (kind) {
        case GateKind::INV:
        case GateKind::BUF: return 1;
        case GateKind::AO222: return 6;
        default: return 2;
    }
}

int stage_weight(GateKind kind) { return kind == GateKind::XOR2 ? 2 : 1; }

NodeId GateNetlist::add_input(std::string label) {
    NodeId id = is_input_.size();
    is_input_.push_back(true);
    gate_index_.push_back(kNoGate);
    inputs_.push_back(id);
    (void)label;
    return id;
}

NodeId GateNetlist::add_gate(GateKind kind, std::vector<NodeId> inputs, std::string label) {
    NodeId id = is_input_.size();
    is_input_.push_back(false);
    gate_index_.push_back(gates_.size());
    gates_.push_back(Gate{id, kind, std::move(inputs), std::move(label)});
    return id;
}

void GateNetlist::add_output(std::string name, NodeId node) { outputs_.emplace_back(std::move(name), node); }

const Gate& GateNetlist::gate(NodeId id) const {
    if (id >= node_count() || is_input_[id]) throw StructuralError("node " + std::to_string(id) + " is not a gate");
    return gates_[gate_index_[id]];
}

NodeId GateNetlist::output(std::string_view name) const {
    for (const auto& [n, id] : outputs_) {
        if (n == name) return id;
    }
    throw StructuralError("no output named " + std::string(name));
}

void GateNetlist::validate() const {
    for (const auto& g : gates_) {
        if (g.inputs.size() != fan_in(g.kind)) {
            throw StructuralError(std::string(to_string(g.kind)) + " gate " + std::to_string(g.id) +
                                  " has wrong fan-in");
        }
        for (NodeId in : g.inputs) {
            if (in >= node_count()) throw StructuralError("unresolved input " + std::to_string(in));
        }
    }
    for (const auto& [name, id] : outputs_) {
        if (id >= node_count()) throw StructuralError("output " + name + " is unresolved");
    }
    (void)topological_order();
}

std::vector<NodeId> GateNetlist::topological_order() const {
    // Kahn's algorithm, always releasing the lowest ready id first.
    std::vector<std::size_t> pending(node_count(), 0);
    std::vector<std::vector<NodeId>> fanout(node_count());
    for (const auto& g : gates_) {
        for (NodeId in : g.inputs) {
            if (in >= node_count()) throw StructuralError("unresolved input " + std::to_string(in));
            fanout[in].push_back(g.id);
            ++pending[g.id];
        }
    }
    std::vector<NodeId> ready;
    for (NodeId id = 0; id < node_count(); ++id) {
        if (pending[id] == 0) ready.push_back(id);
    }
    std::vector<NodeId> order;
    std::size_t visited = 0;
    while (!ready.empty()) {
        auto it = std::min_element(ready.begin(), ready.end());
        NodeId id = *it;
        ready.erase(it);
        ++visited;
        if (!is_input_[id]) order.push_back(id);
        for (NodeId next : fanout[id]) {
            if (--pending[next] == 0) ready.push_back(next);
        }
    }
    if (visited != node_count()) throw StructuralError("netlist contains a cycle");
    return order;
}

std::vector<bool> GateNetlist::evaluate(std::span<const bool> input_values) const {
    if (input_values.size() != inputs_.size()) throw StructuralError("wrong number of input values");
    std::vector<bool> v(node_count(), false);
    for (std::size_t i = 0; i < inputs_.size(); ++i) v[inputs_[i]] = input_values[i];
    for (NodeId id : topological_order()) {
        const Gate& g = gates_[gate_index_[id]];
        if (g.inputs.size() != fan_in(g.kind)) throw StructuralError("fan-in mismatch");
        auto in = [&](std::size_t k) { return bool(v[g.inputs[k]]); };
        bool out = false;
        switch (g.kind) {
            case GateKind::INV: out = !in(0); break;
            case GateKind::BUF: out = in(0); break;
            case GateKind::NAND2: out = !(in(0) && in(1)); break;
            case GateKind::NOR2: out = !(in(0) || in(1)); break;
            case GateKind::AND2: out = in(0) && in(1); break;
            case GateKind::OR2: out = in(0) || in(1); break;
            case GateKind::XOR2: out = in(0) != in(1); break;
            case GateKind::AO222: out = (in(0) && in(1)) || (in(2) && in(3)) || (in(4) && in(5)); break;
        }
        v[id] = out;
    }
    return v;
}

CompressorOutputs simulate_netlist(const GateNetlist& netlist, unsigned pattern, bool cin) {
    netlist.validate();
    const auto in = CompressorInputs::from_index(pattern, cin);
    std::vector<char> values{in.x1, in.x2, in.x3, in.x4};
    const std::size_t n = netlist.inputs().size();
    if (n == 5) {
        values.push_back(in.cin);
    } else if (n != 4) {
        throw StructuralError("compressor netlist needs 4 or 5 inputs");
    }
    bool buf[5];
    for (std::size_t i = 0; i < n; ++i) buf[i] = values[i] != 0;
    auto v = netlist.evaluate(std::span<const bool>(buf, n));

    CompressorOutputs out;
    out.carry = v[netlist.output("carry")];
    out.sum = v[netlist.output("sum")];
    for (const auto& [name, id] : netlist.outputs()) {
        if (name == "cout") out.cout = v[id];
    }
    return out;
}

CriticalPath critical_path(const GateNetlist& netlist) {
    netlist.validate();
    std::vector<int> arrival(netlist.node_count(), 0);
    std::vector<NodeId> pred(netlist.node_count(), kNoGate);
    for (NodeId id : netlist.topological_order()) {
        const Gate& g = netlist.gate(id);
        int best = -1;
        NodeId best_in = kNoGate;
        for (NodeId in : g.inputs) {
            if (arrival[in] > best || (arrival[in] == best && in < best_in)) {
                best = arrival[in];
                best_in = in;
            }
        }
        arrival[id] = best + stage_weight(g.kind);
        pred[id] = best_in;
    }

    CriticalPath path;
    NodeId end = kNoGate;
    path.stages = -1;
    for (const auto& [name, id] : netlist.outputs()) {
        if (arrival[id] > path.stages) {
            path.stages = arrival[id];
            path.output = name;
            end = id;
        }
    }
    if (end == kNoGate) return CriticalPath{};
    for (NodeId id = end; !netlist.is_input(id); id = pred[id]) {
        path.nodes.push_back(id);
        path.gates.push_back(netlist.gate(id).kind);
    }
    std::reverse(path.nodes.begin(), path.nodes.end());
    std::reverse(path.gates.begin(), path.gates.end());
    return path;
}

GateNetlist proposed_netlist() {
    GateNetlist n;
    const NodeId x1 = n.add_input("x1");
    const NodeId x2 = n.add_input("x2");
    const NodeId x3 = n.add_input("x3");
    const NodeId x4 = n.add_input("x4");

    const NodeId a = n.add_gate(GateKind::NOR2, {x1, x2}, "A");
    const NodeId b = n.add_gate(GateKind::NAND2, {x1, x2}, "B");
    const NodeId c = n.add_gate(GateKind::NOR2, {x3, x4}, "C");
    const NodeId d = n.add_gate(GateKind::NAND2, {x3, x4}, "D");

    // Carry = !(B.D) + !(A+C)
    const NodeId bd = n.add_gate(GateKind::NAND2, {b, d}, "nand_BD");
    const NodeId ac = n.add_gate(GateKind::NOR2, {a, c}, "nor_AC");
    const NodeId carry = n.add_gate(GateKind::OR2, {bd, ac}, "carry");

    // Sum = X12.E34 + X34.E12 + !B.!D, where X = exactly one input of the pair
    // is high (!A.B) and E = its complement (pair inputs equal).
    const NodeId nb = n.add_gate(GateKind::INV, {b}, "not_B");
    const NodeId nd = n.add_gate(GateKind::INV, {d}, "not_D");
    const NodeId x12 = n.add_gate(GateKind::NOR2, {a, nb}, "X12");
    const NodeId x34 = n.add_gate(GateKind::NOR2, {c, nd}, "X34");
    const NodeId e12 = n.add_gate(GateKind::INV, {x12}, "E12");
    const NodeId e34 = n.add_gate(GateKind::INV, {x34}, "E34");
    const NodeId sum = n.add_gate(GateKind::AO222, {x12, e34, x34, e12, nb, nd}, "sum");

    n.add_output("carry", carry);
    n.add_output("sum", sum);
    return n;
}

GateNetlist exact_compressor_netlist() {
    GateNetlist n;
    const NodeId x1 = n.add_input("x1");
    const NodeId x2 = n.add_input("x2");
    const NodeId x3 = n.add_input("x3");
    const NodeId x4 = n.add_input("x4");
    const NodeId cin = n.add_input("cin");

    // sum = a^b^c, carry = a.b + c.(a^b)
    auto full_adder = [&n](NodeId a, NodeId b, NodeId c) {
        const NodeId p = n.add_gate(GateKind::XOR2, {a, b});
        const NodeId s = n.add_gate(GateKind::XOR2, {p, c});
        const NodeId g = n.add_gate(GateKind::AND2, {a, b});
        const NodeId t = n.add_gate(GateKind::AND2, {c, p});
        const NodeId co = n.add_gate(GateKind::OR2, {g, t});
        return std::pair{s, co};
    };
    const auto [s1, cout] = full_adder(x1, x2, x3);
    const auto [sum, carry] = full_adder(s1, x4, cin);

    n.add_output("cout", cout);
    n.add_output("carry", carry);
    n.add_output("sum", sum);
    return n;
}

}  // namespace axmul
