#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "axmul/compressor.hpp"

namespace axmul {

enum class GateKind { INV, BUF, NAND2, NOR2, AND2, OR2, XOR2, AO222 };

std::string_view to_string(GateKind kind);
std::size_t fan_in(GateKind kind);

/// Logic stages a gate contributes to a path. XOR2 is two stages (a
/// two-level NAND/complex-gate realization); AO222 is a single compound cell.
int stage_weight(GateKind kind);

class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Node ids: primary inputs and gates share one id space, in declaration order.
using NodeId = std::size_t;

struct Gate {
    NodeId id;
    GateKind kind;
    std::vector<NodeId> inputs;
    std::string label;
};

/// Directed gate graph. Gates may reference nodes declared later; validate()
/// checks resolution and acyclicity.
class GateNetlist {
public:
    NodeId add_input(std::string label);
    NodeId add_gate(GateKind kind, std::vector<NodeId> inputs, std::string label = {});
    void add_output(std::string name, NodeId node);

    std::size_t node_count() const { return is_input_.size(); }
    bool is_input(NodeId id) const { return is_input_.at(id); }
    const std::vector<NodeId>& inputs() const { return inputs_; }
    const std::vector<Gate>& gates() const { return gates_; }
    const std::vector<std::pair<std::string, NodeId>>& outputs() const { return outputs_; }
    const Gate& gate(NodeId id) const;
    NodeId output(std::string_view name) const;

    /// Throws StructuralError on unresolved references, fan-in mismatch or cycles.
    void validate() const;
    /// Gates in an evaluation order (ties kept in declaration order).
    std::vector<NodeId> topological_order() const;

    /// Evaluates every node; `input_values` follows inputs() order.
    std::vector<bool> evaluate(std::span<const bool> input_values) const;

private:
    std::vector<bool> is_input_;
    std::vector<std::size_t> gate_index_;  // node id -> gates_ slot, for gate nodes
    std::vector<NodeId> inputs_;
    std::vector<Gate> gates_;
    std::vector<std::pair<std::string, NodeId>> outputs_;
};

/// Simulates a compressor netlist with inputs (x1, x2, x3, x4[, cin]) and
/// outputs named carry/sum (and cout, if present) for the given pattern.
CompressorOutputs simulate_netlist(const GateNetlist& netlist, unsigned pattern, bool cin = false);

struct CriticalPath {
    int stages = 0;                  // sum of stage_weight along the path
    std::vector<GateKind> gates;     // input -> output order
    std::vector<NodeId> nodes;
    std::string output;
};

/// Longest input-to-output path. Ties go to the earlier-declared output, then
/// to the earlier-declared predecessor at each step.
CriticalPath critical_path(const GateNetlist& netlist);

/// NOR/NAND front end, Carry = OR2(NAND2(B, D), NOR2(A, C)), Sum through one AO222.
GateNetlist proposed_netlist();

/// Two cascaded XOR-based full adders with cin/cout pins.
GateNetlist exact_compressor_netlist();

}  // namespace axmul
