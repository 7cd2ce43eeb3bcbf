#include "spdc/dfg.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "spdc/builtins.hpp"

namespace spdc {

std::string_view dfg_node_kind_name(DfgNodeKind k) {
    switch (k) {
        case DfgNodeKind::InputPort: return "input";
        case DfgNodeKind::OutputPort: return "output";
        case DfgNodeKind::EquationModule: return "equation";
        case DfgNodeKind::HdlInstance: return "hdl";
        case DfgNodeKind::DelayModule: return "delay";
        case DfgNodeKind::FormatConverter: return "converter";
    }
    return "?";
}

int Dfg::add_node(DfgNodeKind kind, std::string name, SourceLoc loc) {
    DfgNode n;
    n.id = static_cast<int>(nodes.size());
    n.kind = kind;
    n.name = std::move(name);
    n.loc = loc;
    nodes.push_back(std::move(n));
    return nodes.back().id;
}

int Dfg::add_edge(int src_node, int src_pin, int dst_node, int dst_pin,
                  std::string var, std::optional<std::pair<int, int>> bits) {
    DfgNode& src = node(src_node);
    DfgNode& dst = node(dst_node);
    const DfgPin& sp = src.out_pins[static_cast<size_t>(src_pin)];
    const DfgPin& dp = dst.in_pins[static_cast<size_t>(dst_pin)];

    int width = sp.width;
    if (bits) {
        if (bits->first >= sp.width)
            fail(Errc::WidthMismatch, dst.loc,
                 "bit " + std::to_string(bits->first) + " of '" + var +
                     "' exceeds its " + std::to_string(sp.width) +
                     "-bit width");
        width = bits->first - bits->second + 1;
    }
    if (width > dp.width)
        fail(Errc::WidthMismatch, dst.loc,
             "'" + var + "' is " + std::to_string(width) + " bits but pin '" +
                 dp.name + "' of " + dst.name + " takes only " +
                 std::to_string(dp.width));
    if (width < dp.width)
        warnings.push_back(
            {dst.loc, "'" + var + "' (" + std::to_string(width) +
                          " bits) is zero-extended to " +
                          std::to_string(dp.width) + " bits at " + dst.name});

    DfgEdge e;
    e.id = static_cast<int>(edges.size());
    e.src_node = src_node;
    e.src_pin = src_pin;
    e.dst_node = dst_node;
    e.dst_pin = dst_pin;
    e.var = std::move(var);
    e.bits = bits;
    e.width = width;
    src.out_edges[static_cast<size_t>(src_pin)].push_back(e.id);
    dst.in_edge[static_cast<size_t>(dst_pin)] = e.id;
    edges.push_back(e);
    return e.id;
}

std::optional<std::pair<int, int>> Dfg::find_def(std::string_view var) const {
    for (const auto& n : nodes)
        for (size_t p = 0; p < n.out_pins.size(); ++p)
            if (n.out_pins[p].name == var) return {{n.id, static_cast<int>(p)}};
    return std::nullopt;
}

int Dfg::find_node(std::string_view name) const {
    for (const auto& n : nodes)
        if (n.name == name) return n.id;
    return -1;
}

namespace {

void size_pins(DfgNode& n) {
    n.in_edge.assign(n.in_pins.size(), -1);
    n.out_edges.assign(n.out_pins.size(), {});
}

int port_width(const PortDecl& p) {
    switch (p.cls) {
        case PortClass::Vld:
        case PortClass::Sop:
        case PortClass::Eop:
            return 1;
        default:
            return 32;
    }
}

// Producer table: variable -> (node id, out pin). Enforces single assignment.
class DefMap {
public:
    void add(const std::string& var, int node_id, int pin, SourceLoc loc) {
        auto [it, inserted] = defs_.try_emplace(var, std::pair{node_id, pin});
        if (!inserted)
            fail(Errc::MultiplyDefinedVariable, loc,
                 "variable '" + var + "' is produced more than once");
        (void)it;
    }

    const std::pair<int, int>* find(const std::string& var) const {
        auto it = defs_.find(var);
        return it == defs_.end() ? nullptr : &it->second;
    }

private:
    std::map<std::string, std::pair<int, int>> defs_;
};

}  // namespace

Dfg build_dfg(const SpdProgram& program) {
    Dfg dfg;
    DefMap defs;

    for (const auto& port : program.inputs) {
        int id = dfg.add_node(DfgNodeKind::InputPort, port.name, port.loc);
        DfgNode& n = dfg.node(id);
        n.out_pins.push_back({port.name, port.cls, port_width(port)});
        size_pins(n);
        dfg.input_ports.push_back(id);
        defs.add(port.name, id, 0, port.loc);
    }

    for (const auto& port : program.outputs) {
        int id = dfg.add_node(DfgNodeKind::OutputPort, port.name, port.loc);
        DfgNode& n = dfg.node(id);
        n.in_pins.push_back({port.name, port.cls, port_width(port)});
        size_pins(n);
        dfg.output_ports.push_back(id);
    }

    for (size_t i = 0; i < program.nodes.size(); ++i) {
        const NodeDecl& decl = program.nodes[i];
        if (decl.kind == NodeKind::Equation) {
            int id = dfg.add_node(DfgNodeKind::EquationModule, decl.label,
                                  decl.loc);
            DfgNode& n = dfg.node(id);
            n.decl_index = static_cast<int>(i);
            for (const auto& var : free_variables(*decl.expr, program.params))
                n.in_pins.push_back({var, PortClass::Numeric, 32});
            n.out_pins.push_back({decl.lhs, PortClass::Numeric, 32});
            size_pins(n);
            defs.add(decl.lhs, id, 0, decl.loc);
        } else {
            int id =
                dfg.add_node(DfgNodeKind::HdlInstance, decl.label, decl.loc);
            DfgNode& n = dfg.node(id);
            n.decl_index = static_cast<int>(i);
            n.latency = decl.declared_delay;
            auto shape = builtin_shape(decl.call);
            for (size_t a = 0; a < decl.call.inputs.size(); ++a) {
                const HdlArg& arg = decl.call.inputs[a];
                int w = shape ? shape->in_widths[a] : 32;
                n.in_pins.push_back({arg.name, classify_port(arg.name), w});
            }
            for (size_t o = 0; o < decl.call.outputs.size(); ++o) {
                const std::string& var = decl.call.outputs[o];
                int w = shape ? shape->out_widths[o] : 32;
                n.out_pins.push_back({var, classify_port(var), w});
                defs.add(var, id, static_cast<int>(o), decl.loc);
            }
            size_pins(n);
        }
    }

    // Wire every consumer pin to the unique producer of its variable.
    for (auto& n : dfg.nodes) {
        if (n.kind == DfgNodeKind::InputPort) continue;
        if (n.kind == DfgNodeKind::OutputPort) {
            const DfgPin& pin = n.in_pins[0];
            const auto* def = defs.find(pin.name);
            if (!def) {
                // Control outputs stay open for route_control_sideband.
                if (pin.cls == PortClass::Vld || pin.cls == PortClass::Sop ||
                    pin.cls == PortClass::Eop)
                    continue;
                fail(Errc::DanglingOutput, n.loc,
                     "output port '" + pin.name + "' is driven by nothing");
            }
            dfg.add_edge(def->first, def->second, n.id, 0, pin.name);
            continue;
        }
        for (size_t p = 0; p < n.in_pins.size(); ++p) {
            const DfgPin& pin = n.in_pins[p];
            const auto* def = defs.find(pin.name);
            if (!def)
                fail(Errc::UndefinedVariable, n.loc,
                     "variable '" + pin.name + "' read by " + n.name +
                         " is never produced");
            std::optional<std::pair<int, int>> bits;
            if (n.kind == DfgNodeKind::HdlInstance)
                bits = program.nodes[static_cast<size_t>(n.decl_index)]
                           .call.inputs[p]
                           .bits;
            dfg.add_edge(def->first, def->second, n.id, static_cast<int>(p),
                         pin.name, bits);
        }
    }

    return dfg;
}

void route_control_sideband(Dfg& dfg, const SpdProgram& program) {
    (void)program;
    for (int out_id : dfg.output_ports) {
        DfgNode& out = dfg.node(out_id);
        const DfgPin& pin = out.in_pins[0];
        if (pin.cls != PortClass::Vld && pin.cls != PortClass::Sop &&
            pin.cls != PortClass::Eop)
            continue;
        if (out.in_edge[0] >= 0) continue;  // user logic drives it
        // Find the same-class input port.
        int in_id = -1;
        for (int cand : dfg.input_ports)
            if (dfg.node(cand).out_pins[0].cls == pin.cls) in_id = cand;
        if (in_id < 0)
            fail(Errc::ControlPortConflict, out.loc,
                 "output port '" + pin.name + "' has no driver and no " +
                     std::string(port_class_name(pin.cls)) +
                     " input port to route from");
        DfgNode& in = dfg.node(in_id);
        if (!in.out_edges[0].empty())
            fail(Errc::ControlPortConflict, out.loc,
                 "cannot auto-route '" + in.out_pins[0].name + "' to '" +
                     pin.name + "': the input is already consumed by " +
                     dfg.node(dfg.edge(in.out_edges[0][0]).dst_node).name);
        dfg.add_edge(in_id, 0, out_id, 0, in.out_pins[0].name);
    }
}

void insert_format_converters(Dfg& dfg, int conv_in_latency,
                              int conv_out_latency) {
    // Collect targets first; adding nodes invalidates iteration references.
    std::vector<int> ins, outs;
    for (int id : dfg.input_ports)
        if (dfg.node(id).out_pins[0].cls == PortClass::Numeric) ins.push_back(id);
    for (int id : dfg.output_ports)
        if (dfg.node(id).in_pins[0].cls == PortClass::Numeric) outs.push_back(id);

    for (int port_id : ins) {
        int conv = dfg.add_node(DfgNodeKind::FormatConverter,
                                "conv_in_" + dfg.node(port_id).name,
                                dfg.node(port_id).loc);
        DfgNode& c = dfg.node(conv);
        c.latency = conv_in_latency;
        c.conv_input_side = true;
        std::string var = dfg.node(port_id).out_pins[0].name;
        c.in_pins.push_back({var, PortClass::Numeric, 32});
        c.out_pins.push_back({var, PortClass::Numeric, 32});
        size_pins(c);
        // Steal the port's fan-out, then wire port -> converter -> consumers.
        DfgNode& port = dfg.node(port_id);
        std::vector<int> consumers = std::move(port.out_edges[0]);
        port.out_edges[0].clear();
        for (int eid : consumers) {
            DfgEdge& e = dfg.edge(eid);
            e.src_node = conv;
            c.out_edges[0].push_back(eid);
        }
        dfg.add_edge(port_id, 0, conv, 0, var);
    }

    for (int port_id : outs) {
        int conv = dfg.add_node(DfgNodeKind::FormatConverter,
                                "conv_out_" + dfg.node(port_id).name,
                                dfg.node(port_id).loc);
        DfgNode& c = dfg.node(conv);
        c.latency = conv_out_latency;
        c.conv_input_side = false;
        std::string var = dfg.node(port_id).in_pins[0].name;
        c.in_pins.push_back({var, PortClass::Numeric, 32});
        c.out_pins.push_back({var, PortClass::Numeric, 32});
        size_pins(c);
        DfgNode& port = dfg.node(port_id);
        int eid = port.in_edge[0];
        DfgEdge& e = dfg.edge(eid);
        e.dst_node = conv;
        e.dst_pin = 0;
        c.in_edge[0] = eid;
        port.in_edge[0] = -1;
        dfg.add_edge(conv, 0, port_id, 0, var);
    }
}

void note_unused_pins(Dfg& dfg) {
    for (const auto& n : dfg.nodes) {
        for (size_t p = 0; p < n.out_pins.size(); ++p) {
            if (!n.out_edges[p].empty()) continue;
            if (n.kind == DfgNodeKind::InputPort)
                dfg.warnings.push_back(
                    {n.loc, "input port '" + n.out_pins[p].name +
                                "' is never used"});
            else
                dfg.warnings.push_back(
                    {n.loc, "output '" + n.out_pins[p].name + "' of " +
                                n.name + " is never used"});
        }
    }
}

const std::vector<int>& topo_sort(Dfg& dfg) {
    size_t n = dfg.nodes.size();
    std::vector<int> indeg(n, 0);
    for (const auto& node : dfg.nodes)
        for (int eid : node.in_edge)
            if (eid >= 0) ++indeg[static_cast<size_t>(node.id)];

    std::set<int> ready;
    for (const auto& node : dfg.nodes)
        if (indeg[static_cast<size_t>(node.id)] == 0) ready.insert(node.id);

    std::vector<int> order;
    order.reserve(n);
    while (!ready.empty()) {
        int id = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(id);
        for (const auto& fanout : dfg.node(id).out_edges)
            for (int eid : fanout) {
                int dst = dfg.edge(eid).dst_node;
                if (--indeg[static_cast<size_t>(dst)] == 0) ready.insert(dst);
            }
    }

    if (order.size() != n) {
        // Every leftover node sits on or behind a loop; follow edges within
        // the leftover set until a node repeats, then name that loop.
        std::vector<bool> stuck(n, false);
        int start = -1;
        for (const auto& node : dfg.nodes)
            if (indeg[static_cast<size_t>(node.id)] > 0) {
                stuck[static_cast<size_t>(node.id)] = true;
                if (start < 0) start = node.id;
            }
        // Walk predecessors: every stuck node has an unprocessed (stuck)
        // producer, so the walk must eventually revisit a node, closing a
        // loop.
        std::vector<int> path;
        std::vector<int> pos(n, -1);
        int cur = start;
        while (pos[static_cast<size_t>(cur)] < 0) {
            pos[static_cast<size_t>(cur)] = static_cast<int>(path.size());
            path.push_back(cur);
            int prev = -1;
            for (int eid : dfg.node(cur).in_edge)
                if (eid >= 0 &&
                    stuck[static_cast<size_t>(dfg.edge(eid).src_node)]) {
                    prev = dfg.edge(eid).src_node;
                    break;
                }
            cur = prev;
        }
        std::ostringstream os;
        os << "the design contains a feedback loop:";
        os << " " << dfg.node(cur).name;
        for (size_t i = path.size();
             i-- > static_cast<size_t>(pos[static_cast<size_t>(cur)]);)
            os << " -> " << dfg.node(path[i]).name;
        fail(Errc::CycleDetected, dfg.node(cur).loc, os.str());
    }

    dfg.topo_order = std::move(order);
    return dfg.topo_order;
}

}  // namespace spdc
