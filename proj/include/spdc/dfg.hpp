#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spdc/ast.hpp"

namespace spdc {

enum class DfgNodeKind {
    InputPort,
    OutputPort,
    EquationModule,
    HdlInstance,
    DelayModule,
    FormatConverter,
};

std::string_view dfg_node_kind_name(DfgNodeKind k);

struct DfgPin {
    std::string name;  // variable carried on this pin
    PortClass cls = PortClass::Numeric;
    int width = 32;
};

struct DfgEdge {
    int id = -1;
    int src_node = -1;
    int src_pin = -1;  // index into out_pins of src
    int dst_node = -1;
    int dst_pin = -1;  // index into in_pins of dst
    std::string var;
    std::optional<std::pair<int, int>> bits;  // slice applied at the consumer
    int width = 32;                           // effective carried width
};

struct DfgNode {
    int id = -1;
    DfgNodeKind kind = DfgNodeKind::EquationModule;
    std::string name;  // node label, port name, or synthesized name
    SourceLoc loc;

    int decl_index = -1;  // Equation/HdlInstance: index into program.nodes
    int latency = 0;      // pipeline cycles through this node
    bool conv_input_side = false;  // FormatConverter placement

    std::vector<DfgPin> in_pins;
    std::vector<DfgPin> out_pins;
    std::vector<int> in_edge;                // edge id per in pin, -1 = open
    std::vector<std::vector<int>> out_edges; // edge ids per out pin (fan-out)
};

struct Dfg {
    std::vector<DfgNode> nodes;
    std::vector<DfgEdge> edges;
    std::vector<int> input_ports;   // node ids, declaration order
    std::vector<int> output_ports;  // node ids, declaration order
    std::vector<int> topo_order;    // cached; refreshed by topo_sort
    WarningList warnings;

    DfgNode& node(int id) { return nodes[static_cast<size_t>(id)]; }
    const DfgNode& node(int id) const { return nodes[static_cast<size_t>(id)]; }
    DfgEdge& edge(int id) { return edges[static_cast<size_t>(id)]; }
    const DfgEdge& edge(int id) const { return edges[static_cast<size_t>(id)]; }

    int add_node(DfgNodeKind kind, std::string name, SourceLoc loc = {});
    // Connects src out-pin to dst in-pin; fails on width truncation and
    // out-of-range slices. Returns the edge id.
    int add_edge(int src_node, int src_pin, int dst_node, int dst_pin,
                 std::string var,
                 std::optional<std::pair<int, int>> bits = std::nullopt);

    // Source (node, pin) producing `var`, or nullopt.
    std::optional<std::pair<int, int>> find_def(std::string_view var) const;
    int find_node(std::string_view name) const;  // -1 when absent

    int num_consumers(int node_id, int out_pin) const {
        return static_cast<int>(node(node_id).out_edges[static_cast<size_t>(out_pin)].size());
    }
};

/// Build the dataflow graph for a parsed program: one node per declaration
/// plus one per top-level port, edges wherever a consumed variable matches a
/// produced one. Enforces single assignment, rejects undefined variables and
/// feedback loops, and leaves undriven valid/sop/eop output ports open for
/// route_control_sideband.
Dfg build_dfg(const SpdProgram& program);

/// Connect undriven valid/sop/eop output ports straight to the same-class
/// input port (pipeline_balancer pads these pass-throughs to full depth).
/// User wiring through HDL nodes is left intact.
void route_control_sideband(Dfg& dfg, const SpdProgram& program);

/// Insert a FormatConverter after every numeric input port and before every
/// numeric output port. Raw and control ports bypass conversion. Converter
/// latencies are the given per-direction cycle counts.
void insert_format_converters(Dfg& dfg, int conv_in_latency,
                              int conv_out_latency);

/// Deterministic topological order (Kahn's algorithm, ties broken by node
/// id, i.e. declaration order). Stores into dfg.topo_order and returns it.
/// Reports the labels along one offending loop on failure.
const std::vector<int>& topo_sort(Dfg& dfg);

/// Record a warning for every produced value nobody consumes (unused input
/// ports and dangling node outputs). Call after route_control_sideband so
/// auto-routed control ports are not misreported.
void note_unused_pins(Dfg& dfg);

}  // namespace spdc
