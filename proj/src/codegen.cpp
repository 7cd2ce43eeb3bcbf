// Verilog-2001 back end. All text is assembled deterministically — node and
// edge order come from the graph's stable ids, names from a collision-free
// allocator — so identical designs produce byte-identical artifacts (the
// build timestamp is injected from EmitOptions::epoch, which the driver
// pins via SPDC_EPOCH).

#include "spdc/codegen.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "spdc/builtins.hpp"
#include "spdc/hdl_lib.hpp"
#include "spdc/stream.hpp"

namespace spdc {

namespace {

std::string sanitize_ident(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                  (c >= '0' && c <= '9') || c == '_';
        out.push_back(ok ? c : '_');
    }
    if (out.empty() || (out[0] >= '0' && out[0] <= '9')) out.insert(0, "_");
    return out;
}

// Unique-name allocator over one namespace. Generated names take numeric
// suffixes on collision; names that must stay exactly as the user wrote
// them go through alloc_user, which treats a clash as an error.
struct NamePool {
    std::set<std::string> used;

    std::string alloc(const std::string& base) {
        if (used.insert(base).second) return base;
        for (int i = 2;; ++i) {
            std::string t = base + "_" + std::to_string(i);
            if (used.insert(t).second) return t;
        }
    }
    std::string alloc_user(const std::string& base, const SourceLoc& loc) {
        if (!used.insert(base).second)
            fail(Errc::NameCollision, loc,
                 "name '" + base +
                     "' is not unique after identifier sanitization");
        return base;
    }
    void reserve(std::initializer_list<const char*> names) {
        for (const char* n : names) used.insert(n);
    }
};

std::string epoch_utc(long long epoch) {
    std::time_t t = static_cast<std::time_t>(epoch);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%d %H:%M:%S UTC", &tm);
    return buf;
}

std::string hex_word(uint32_t w) {
    char b[16];
    std::snprintf(b, sizeof b, "32'h%08x", w);
    return b;
}

std::string fmt_float(float f) {
    char b[48];
    std::snprintf(b, sizeof b, "%.9g", static_cast<double>(f));
    return b;
}

const char* fp_module_of(OpKind k) {
    switch (k) {
        case OpKind::Add: return "fp_add";
        case OpKind::Sub: return "fp_sub";
        case OpKind::Mul: return "fp_mul";
        case OpKind::ConstMul: return "fp_const_mul";
        case OpKind::Div: return "fp_div";
        case OpKind::Neg: return nullptr;  // free sign flip, no module
    }
    return nullptr;
}

std::vector<std::string> builtin_in_ports(const std::string& m) {
    if (m == "mDelay") return {"d"};
    if (m == "mMux") return {"a", "b", "sel"};
    if (m == "less_than") return {"a", "b"};
    if (m == "swap") return {"less", "x", "y"};
    std::vector<std::string> p;  // mTrans
    for (int i = 0; i < 9; ++i) p.push_back("f" + std::to_string(i) + "_i");
    p.insert(p.end(), {"attr_i", "vld_i", "sop_i", "eop_i"});
    return p;
}

std::vector<std::string> builtin_out_ports(const std::string& m) {
    if (m == "mDelay" || m == "mMux" || m == "less_than") return {"q"};
    if (m == "swap") return {"big", "small"};
    std::vector<std::string> p;  // mTrans
    for (int i = 0; i < 9; ++i) p.push_back("f" + std::to_string(i) + "_o");
    p.insert(p.end(), {"attr_o", "vld_o", "sop_o", "eop_o"});
    return p;
}

// Library files each library module pulls in besides its own (transitive
// closure, flattened).
const std::map<std::string, std::vector<std::string>>& lib_deps() {
    static const std::map<std::string, std::vector<std::string>> deps = {
        {"fp_add", {"spdc_delay"}},
        {"fp_sub", {"fp_add", "spdc_delay"}},
        {"fp_mul", {"spdc_delay"}},
        {"fp_const_mul", {"fp_mul", "spdc_delay"}},
        {"fp_div", {"spdc_delay"}},
        {"fp_conv", {"spdc_delay"}},
        {"mDelay", {"spdc_delay"}},
        {"mTrans", {"spdc_delay", "spdc_delay_mem"}},
    };
    return deps;
}

struct Emitter {
    const CompiledDesign& d;
    const EmitOptions& opt;
    HdlArtifactSet art;

    NamePool pool;  // top-level wires + instances share one namespace
    std::map<std::pair<int, int>, std::string> wires;  // driver pin -> name
    std::map<int, std::string> inst;                   // node -> instance
    std::set<std::string> instantiated;                // module names used
    std::set<std::string> lib_refs;                    // library modules used
    std::set<std::string> design_modules;              // emitted module names
    std::set<std::string> externals;
    std::set<int> mem_nodes;  // delay nodes long enough for RAM

    struct EqInfo {
        std::string module;
        std::vector<std::string> in_ports;  // aligned with node in_pins
        std::string out_port;
    };
    std::map<int, EqInfo> eq;

    std::vector<int> data_in, data_out;
    int vld_in = -1, sop_in = -1, eop_in = -1;
    int vld_out = -1, sop_out = -1, eop_out = -1;

    explicit Emitter(const CompiledDesign& des, const EmitOptions& o)
        : d(des), opt(o) {}

    std::string conn(int eid) const {
        const DfgEdge& e = d.dfg.edge(eid);
        std::string s = wires.at({e.src_node, e.src_pin});
        if (e.bits) {
            int src_w =
                d.dfg.node(e.src_node).out_pins[static_cast<size_t>(e.src_pin)]
                    .width;
            int msb = e.bits->first, lsb = e.bits->second;
            if (!(lsb == 0 && msb == src_w - 1)) {
                s += msb == lsb ? "[" + std::to_string(msb) + "]"
                                : "[" + std::to_string(msb) + ":" +
                                      std::to_string(lsb) + "]";
            }
        }
        return s;
    }

    static std::string wire_decl(const std::string& name, int width) {
        if (width <= 1) return "    wire        " + name + ";\n";
        char b[32];
        std::snprintf(b, sizeof b, "    wire [%2d:0] ", width - 1);
        return b + name + ";\n";
    }

    void classify_ports();
    void assign_names();
    std::string emit_equation(const DfgNode& n);
    std::string emit_top();
    std::string emit_manifest();
    std::string emit_hw_tcl();
    void closure_check();
    void run();
};

void Emitter::classify_ports() {
    for (int id : d.dfg.input_ports) {
        switch (d.dfg.node(id).out_pins[0].cls) {
            case PortClass::Vld: vld_in = id; break;
            case PortClass::Sop: sop_in = id; break;
            case PortClass::Eop: eop_in = id; break;
            default: data_in.push_back(id); break;
        }
    }
    for (int id : d.dfg.output_ports) {
        switch (d.dfg.node(id).in_pins[0].cls) {
            case PortClass::Vld: vld_out = id; break;
            case PortClass::Sop: sop_out = id; break;
            case PortClass::Eop: eop_out = id; break;
            default: data_out.push_back(id); break;
        }
    }
    for (const DelayChain& c : d.schedule.chains) {
        if (c.memory_based)
            mem_nodes.insert(c.segment_nodes.begin(), c.segment_nodes.end());
    }
}

void Emitter::assign_names() {
    pool.reserve({"clk", "reset_n", "in_data", "in_valid", "in_sop", "in_eop",
                  "in_ready", "out_data", "out_valid", "out_sop", "out_eop",
                  "out_ready", "out_empty", "ce", "vld_sr", "sop_sr",
                  "eop_sr"});
    // Wires first (id order), then instance names (id order).
    for (const DfgNode& n : d.dfg.nodes) {
        if (n.kind == DfgNodeKind::OutputPort) continue;
        for (size_t p = 0; p < n.out_pins.size(); ++p) {
            std::string base;
            switch (n.kind) {
                case DfgNodeKind::InputPort:
                case DfgNodeKind::EquationModule:
                case DfgNodeKind::HdlInstance:
                    base = "w_" + sanitize_ident(n.out_pins[p].name);
                    break;
                default:  // delay / converter: node names are unique
                    base = "w_" + sanitize_ident(n.name);
                    break;
            }
            wires[{n.id, static_cast<int>(p)}] = pool.alloc(base);
        }
    }
    for (const DfgNode& n : d.dfg.nodes) {
        if (n.kind == DfgNodeKind::InputPort ||
            n.kind == DfgNodeKind::OutputPort)
            continue;
        inst[n.id] = pool.alloc(sanitize_ident(n.name));
    }
}

std::string Emitter::emit_equation(const DfgNode& n) {
    const OperatorDag& dag = d.equations.at(n.id);
    EqInfo info;
    info.module = art.design + "_" + sanitize_ident(n.name);
    design_modules.insert(info.module);

    NamePool p;
    p.reserve({"clk", "ce"});
    for (const DfgPin& pin : n.in_pins)
        info.in_ports.push_back(p.alloc(sanitize_ident(pin.name)));
    info.out_port = p.alloc(sanitize_ident(n.out_pins[0].name));

    const NodeDecl& decl = d.program.nodes[static_cast<size_t>(n.decl_index)];
    std::ostringstream os;
    os << "// " << info.module << " -- pipeline for: " << decl.lhs << " = "
       << (decl.expr ? pretty_print(*decl.expr) : std::string("?")) << "\n";
    os << "// latency " << n.latency << " cycles\n";
    os << "// generated by spdc; build epoch " << epoch_utc(opt.epoch)
       << "\n\n";
    os << "`timescale 1ns / 1ps\n\n";
    os << "module " << info.module << " (\n";
    os << "    input  wire        clk,\n";
    os << "    input  wire        ce";
    for (const std::string& ip : info.in_ports)
        os << ",\n    input  wire [31:0] " << ip;
    os << ",\n    output wire [31:0] " << info.out_port << "\n);\n\n";

    std::vector<std::string> op_wire(dag.ops.size());

    // Text for one operand, inserting an alignment delay when the lowering
    // padded it.
    auto operand = [&](const OpNode::Operand& o, size_t k,
                       const char* side) -> std::string {
        std::string src;
        if (o.is_const) {
            src = hex_word(float_to_word(o.constant));
        } else if (o.is_op()) {
            src = op_wire[static_cast<size_t>(o.op)];
        } else {
            src = info.in_ports[static_cast<size_t>(o.input)];
        }
        if (o.delay > 0) {
            std::string w = p.alloc("s" + std::to_string(k) + "_" + side);
            std::string u = p.alloc("pad" + std::to_string(k) + side);
            os << "    wire [31:0] " << w << ";\n";
            os << "    spdc_delay #(.WIDTH(32), .DEPTH(" << o.delay << ")) "
               << u << " (.clk(clk), .ce(ce), .d(" << src << "), .q(" << w
               << "));\n";
            lib_refs.insert("spdc_delay");
            instantiated.insert("spdc_delay");
            src = w;
        }
        return src;
    };

    for (size_t k = 0; k < dag.ops.size(); ++k) {
        const OpNode& op = dag.ops[k];
        std::string ea = operand(op.a, k, "a");
        std::string w = p.alloc("s" + std::to_string(k));
        op_wire[k] = w;
        if (op.kind == OpKind::Neg) {
            os << "    wire [31:0] " << w << " = {~" << ea << "[31], " << ea
               << "[30:0]};  // sign flip, 0 cycles\n";
            continue;
        }
        std::string eb = operand(op.b, k, "b");
        os << "    wire [31:0] " << w << ";\n";
        const char* mod = fp_module_of(op.kind);
        lib_refs.insert(mod);
        instantiated.insert(mod);
        std::string u = p.alloc("op" + std::to_string(k));
        if (op.kind == OpKind::ConstMul) {
            os << "    fp_const_mul #(.LATENCY(" << op.latency << "), .CONST("
               << hex_word(float_to_word(op.b.constant)) << ")) " << u
               << " (.clk(clk), .ce(ce), .a(" << ea << "), .q(" << w
               << "));  // * " << fmt_float(op.b.constant) << "\n";
        } else {
            os << "    " << mod << " #(.LATENCY(" << op.latency << ")) " << u
               << " (.clk(clk), .ce(ce), .a(" << ea << "), .b(" << eb
               << "), .q(" << w << "));\n";
        }
    }

    os << "\n";
    if (dag.root_op >= 0) {
        os << "    assign " << info.out_port << " = "
           << op_wire[static_cast<size_t>(dag.root_op)] << ";\n";
    } else if (dag.root_input >= 0) {
        os << "    assign " << info.out_port << " = "
           << info.in_ports[static_cast<size_t>(dag.root_input)] << ";\n";
    } else {
        os << "    assign " << info.out_port << " = "
           << hex_word(float_to_word(dag.root_const)) << ";  // constant "
           << fmt_float(dag.root_const) << "\n";
    }
    os << "\nendmodule\n";
    eq[n.id] = std::move(info);
    return os.str();
}

std::string Emitter::emit_top() {
    const int in_bits = 32 * static_cast<int>(data_in.size());
    const int out_bits = 32 * static_cast<int>(data_out.size());
    const int depth = d.schedule.pipeline_depth;

    std::ostringstream os;
    os << "// " << art.design << " -- stream processor top\n";
    os << "// pipeline depth " << depth << " cycles; one vector per enabled"
       << " cycle\n";
    os << "// generated by spdc; build epoch " << epoch_utc(opt.epoch)
       << "\n\n";
    os << "`timescale 1ns / 1ps\n\n";
    os << "module " << art.design << " (\n";
    os << "    input  wire clk,\n";
    os << "    input  wire reset_n,\n\n";
    char b[64];
    os << "    // sink stream\n";
    os << "    input  wire [" << in_bits - 1 << ":0] in_data,\n";
    os << "    input  wire in_valid,\n";
    os << "    input  wire in_sop,\n";
    os << "    input  wire in_eop,\n";
    os << "    output wire in_ready,\n\n";
    os << "    // source stream\n";
    os << "    output wire [" << out_bits - 1 << ":0] out_data,\n";
    os << "    output wire out_valid,\n";
    os << "    output wire out_sop,\n";
    os << "    output wire out_eop,\n";
    os << "    input  wire out_ready,\n";
    os << "    output wire out_empty\n";
    os << ");\n\n";
    os << "    // one clock-enable for the whole pipeline: advance when the\n"
          "    // consumer accepts or nothing valid is waiting\n";
    os << "    wire ce = out_ready | ~out_valid;\n";
    os << "    assign in_ready = ce;\n";
    os << "    assign out_empty = 1'b0;\n\n";

    os << "    // input fields (field 0 at bits [31:0])\n";
    for (size_t i = 0; i < data_in.size(); ++i) {
        const DfgNode& n = d.dfg.node(data_in[i]);
        os << "    wire [31:0] " << wires.at({n.id, 0}) << " = in_data["
           << 32 * (i + 1) - 1 << ":" << 32 * i << "];  // " << n.name
           << (n.out_pins[0].cls == PortClass::Raw ? " (raw)" : "") << "\n";
    }
    auto control_in = [&](int id, const char* expr) {
        if (id < 0) return;
        os << "    wire " << wires.at({id, 0}) << " = " << expr << ";  // "
           << d.dfg.node(id).name << "\n";
    };
    control_in(vld_in, "in_valid");
    control_in(sop_in, "in_valid & in_sop");
    control_in(eop_in, "in_valid & in_eop");
    os << "\n";

    os << "    // internal wires\n";
    for (const DfgNode& n : d.dfg.nodes) {
        if (n.kind == DfgNodeKind::InputPort ||
            n.kind == DfgNodeKind::OutputPort)
            continue;
        for (size_t p = 0; p < n.out_pins.size(); ++p)
            os << wire_decl(wires.at({n.id, static_cast<int>(p)}),
                            n.out_pins[p].width);
    }
    os << "\n";

    for (int id : d.dfg.topo_order) {
        const DfgNode& n = d.dfg.node(id);
        switch (n.kind) {
            case DfgNodeKind::InputPort:
            case DfgNodeKind::OutputPort:
                break;
            case DfgNodeKind::EquationModule: {
                const EqInfo& info = eq.at(id);
                instantiated.insert(info.module);
                os << "    " << info.module << " " << inst.at(id) << " (\n";
                os << "        .clk(clk), .ce(ce)";
                for (size_t p = 0; p < n.in_pins.size(); ++p)
                    os << ",\n        ." << info.in_ports[p] << "("
                       << conn(n.in_edge[p]) << ")";
                os << ",\n        ." << info.out_port << "("
                   << wires.at({id, 0}) << ")\n    );\n";
                break;
            }
            case DfgNodeKind::DelayModule: {
                const char* mod =
                    mem_nodes.count(id) ? "spdc_delay_mem" : "spdc_delay";
                lib_refs.insert(mod);
                instantiated.insert(mod);
                os << "    " << mod << " #(.WIDTH(" << n.out_pins[0].width
                   << "), .DEPTH(" << n.latency << ")) " << inst.at(id)
                   << " (.clk(clk), .ce(ce), .d(" << conn(n.in_edge[0])
                   << "), .q(" << wires.at({id, 0}) << "));\n";
                break;
            }
            case DfgNodeKind::FormatConverter: {
                lib_refs.insert("fp_conv");
                instantiated.insert("fp_conv");
                os << "    fp_conv #(.LATENCY(" << n.latency << ")) "
                   << inst.at(id) << " (.clk(clk), .ce(ce), .d("
                   << conn(n.in_edge[0]) << "), .q(" << wires.at({id, 0})
                   << "));\n";
                break;
            }
            case DfgNodeKind::HdlInstance: {
                const HdlCall& call =
                    d.program.nodes[static_cast<size_t>(n.decl_index)].call;
                std::string mod = sanitize_ident(call.module);
                instantiated.insert(mod);
                std::string params;
                if (!call.params.empty()) {
                    params += " #(";
                    for (size_t i = 0; i < call.params.size(); ++i) {
                        if (i) params += ", ";
                        params += "." + sanitize_ident(call.params[i].name) +
                                  "(" + call.params[i].value + ")";
                    }
                    params += ")";
                }
                if (is_builtin_module(call.module)) {
                    lib_refs.insert(mod);
                    auto ip = builtin_in_ports(call.module);
                    auto op_ = builtin_out_ports(call.module);
                    os << "    " << mod << params << " " << inst.at(id)
                       << " (\n        .clk(clk), .ce(ce)";
                    for (size_t p = 0; p < n.in_pins.size(); ++p)
                        os << ",\n        ." << ip[p] << "("
                           << conn(n.in_edge[p]) << ")";
                    for (size_t p = 0; p < n.out_pins.size(); ++p)
                        os << ",\n        ." << op_[p] << "("
                           << wires.at({id, static_cast<int>(p)}) << ")";
                    os << "\n    );\n";
                } else {
                    // User modules connect positionally:
                    // (clk, ce, inputs..., outputs...); see docs/outputs.md.
                    externals.insert(mod);
                    os << "    " << mod << params << " " << inst.at(id)
                       << " (clk, ce";
                    for (size_t p = 0; p < n.in_pins.size(); ++p)
                        os << ", " << conn(n.in_edge[p]);
                    for (size_t p = 0; p < n.out_pins.size(); ++p)
                        os << ", " << wires.at({id, static_cast<int>(p)});
                    os << ");\n";
                }
                break;
            }
        }
    }

    // Framing sideband: declared control ports route through the graph;
    // anything undeclared gets a reset-cleared shift register of the
    // pipeline depth.
    os << "\n";
    bool need_synth = vld_out < 0 || sop_out < 0 || eop_out < 0;
    if (need_synth && depth > 0) {
        os << "    // synthesized framing sideband (depth " << depth
           << ")\n";
        auto sr = [&](const char* reg, const char* gated) {
            std::snprintf(b, sizeof b, "    reg [%d:0] %s;\n", depth - 1,
                          reg);
            os << b;
            os << "    always @(posedge clk or negedge reset_n)\n";
            os << "        if (!reset_n) " << reg << " <= " << depth
               << "'b0;\n";
            if (depth == 1)
                os << "        else if (ce) " << reg << " <= " << gated
                   << ";\n";
            else
                os << "        else if (ce) " << reg << " <= {" << reg << "["
                   << depth - 2 << ":0], " << gated << "};\n";
        };
        if (vld_out < 0) sr("vld_sr", "in_valid");
        if (sop_out < 0) sr("sop_sr", "in_valid & in_sop");
        if (eop_out < 0) sr("eop_sr", "in_valid & in_eop");
        os << "\n";
    }
    auto control_out = [&](int id, const char* sig, const char* reg,
                           const char* gated) {
        os << "    assign " << sig << " = ";
        if (id >= 0)
            os << conn(d.dfg.node(id).in_edge[0]) << ";  // "
               << d.dfg.node(id).name << "\n";
        else if (depth > 0)
            os << reg << "[" << depth - 1 << "];\n";
        else
            os << gated << ";\n";
    };
    os << "    // output fields\n";
    for (size_t i = 0; i < data_out.size(); ++i) {
        const DfgNode& n = d.dfg.node(data_out[i]);
        os << "    assign out_data[" << 32 * (i + 1) - 1 << ":" << 32 * i
           << "] = " << conn(n.in_edge[0]) << ";  // " << n.name << "\n";
    }
    control_out(vld_out, "out_valid", "vld_sr", "in_valid");
    control_out(sop_out, "out_sop", "sop_sr", "in_valid & in_sop");
    control_out(eop_out, "out_eop", "eop_sr", "in_valid & in_eop");
    os << "\nendmodule\n";
    return os.str();
}

std::string Emitter::emit_manifest() {
    OperatorCensus census = census_of(d.equations);
    std::ostringstream os;
    os << "component " << art.design << "\n";
    os << "generated-by spdc\n";
    os << "build-epoch " << opt.epoch << "\n";
    os << "clock clk\n";
    os << "reset reset_n active-low\n";
    os << "target-mhz " << d.options.freq_mhz << "\n";
    os << "tier-mhz " << d.tier.max_frequency_mhz << "\n";
    os << "pipeline-depth " << d.schedule.pipeline_depth << "\n";
    os << "sink in_data bits " << 32 * data_in.size() << " fields "
       << data_in.size() << "\n";
    for (size_t i = 0; i < data_in.size(); ++i) {
        const DfgNode& n = d.dfg.node(data_in[i]);
        os << "field in " << i << " " << n.name << " "
           << (n.out_pins[0].cls == PortClass::Raw ? "raw" : "numeric")
           << "\n";
    }
    auto ctrl = [&](const char* dir, const char* kind, int id) {
        os << "control " << dir << " " << kind << " "
           << (id >= 0 ? d.dfg.node(id).name : std::string("synthesized"))
           << "\n";
    };
    ctrl("in", "valid", vld_in);
    ctrl("in", "sop", sop_in);
    ctrl("in", "eop", eop_in);
    os << "source out_data bits " << 32 * data_out.size() << " fields "
       << data_out.size() << "\n";
    for (size_t i = 0; i < data_out.size(); ++i) {
        const DfgNode& n = d.dfg.node(data_out[i]);
        os << "field out " << i << " " << n.name << " "
           << (n.in_pins[0].cls == PortClass::Raw ? "raw" : "numeric")
           << "\n";
    }
    ctrl("out", "valid", vld_out);
    ctrl("out", "sop", sop_out);
    ctrl("out", "eop", eop_out);
    os << "census add " << census.add << " sub " << census.sub << " mul "
       << census.mul << " const-mul " << census.const_mul << " div "
       << census.div << " n-ops " << census.total() << "\n";
    os << "delay-chains " << d.schedule.num_chains() << "\n";
    char b[48];
    std::snprintf(b, sizeof b, "delay-word-cycles %.1f\n",
                  d.schedule.delay_word_cycles);
    os << b;
    os << "file top.v\n";
    for (const auto& [label, text] : art.equation_modules) {
        (void)text;
        os << "file eq/" << label << ".v\n";
    }
    for (const std::string& f : art.library_files)
        os << "file hdl_lib/" << f << "\n";
    for (const std::string& m : externals) os << "external-module " << m << "\n";
    return os.str();
}

std::string Emitter::emit_hw_tcl() {
    std::ostringstream os;
    os << "# " << art.design << " hardware component definition\n";
    os << "# generated by spdc; build epoch " << epoch_utc(opt.epoch) << "\n";
    os << "# Illustrative component description; property schemas vary by"
          " tool version.\n\n";
    os << "package require -exact qsys 13.1\n\n";
    os << "set_module_property NAME " << art.design << "\n";
    os << "set_module_property DISPLAY_NAME \"" << art.design
       << " stream processor\"\n";
    os << "set_module_property VERSION 1.0\n";
    os << "set_module_property GROUP \"stream processors\"\n";
    os << "set_module_property EDITABLE false\n\n";
    os << "add_fileset QUARTUS_SYNTH QUARTUS_SYNTH \"\" \"\"\n";
    os << "set_fileset_property QUARTUS_SYNTH TOP_LEVEL " << art.design
       << "\n";
    os << "add_fileset_file top.v VERILOG PATH top.v\n";
    for (const auto& [label, text] : art.equation_modules) {
        (void)text;
        os << "add_fileset_file eq/" << label << ".v VERILOG PATH eq/"
           << label << ".v\n";
    }
    for (const std::string& f : art.library_files)
        os << "add_fileset_file hdl_lib/" << f << " VERILOG PATH hdl_lib/"
           << f << "\n";
    os << "\nadd_interface clock clock end\n";
    os << "add_interface_port clock clk clk Input 1\n";
    os << "add_interface reset reset end\n";
    os << "set_interface_property reset associatedClock clock\n";
    os << "add_interface_port reset reset_n reset_n Input 1\n";
    os << "\nadd_interface in avalon_streaming end\n";
    os << "set_interface_property in associatedClock clock\n";
    os << "set_interface_property in dataBitsPerSymbol 32\n";
    os << "add_interface_port in in_data data Input " << 32 * data_in.size()
       << "\n";
    os << "add_interface_port in in_valid valid Input 1\n";
    os << "add_interface_port in in_sop startofpacket Input 1\n";
    os << "add_interface_port in in_eop endofpacket Input 1\n";
    os << "add_interface_port in in_ready ready Output 1\n";
    os << "\nadd_interface out avalon_streaming start\n";
    os << "set_interface_property out associatedClock clock\n";
    os << "set_interface_property out dataBitsPerSymbol 32\n";
    os << "add_interface_port out out_data data Output "
       << 32 * data_out.size() << "\n";
    os << "add_interface_port out out_valid valid Output 1\n";
    os << "add_interface_port out out_sop startofpacket Output 1\n";
    os << "add_interface_port out out_eop endofpacket Output 1\n";
    os << "add_interface_port out out_ready ready Input 1\n";
    os << "add_interface_port out out_empty empty Output 1\n";
    return os.str();
}

void Emitter::closure_check() {
    std::set<std::string> available = design_modules;
    for (const auto& [name, text] : hdl_library_files()) {
        (void)text;
        std::string stem(name);
        if (stem.size() > 2 && stem.substr(stem.size() - 2) == ".v")
            stem.resize(stem.size() - 2);
        available.insert(stem);
    }
    available.insert(externals.begin(), externals.end());
    for (const std::string& m : instantiated) {
        if (!available.count(m))
            fail(Errc::SizeMismatch,
                 "internal: module '" + m +
                     "' is instantiated but neither emitted nor shipped");
    }
}

void Emitter::run() {
    art.design = sanitize_ident(d.program.name);
    design_modules.insert(art.design);
    classify_ports();
    assign_names();
    for (const DfgNode& n : d.dfg.nodes) {
        if (n.kind != DfgNodeKind::EquationModule) continue;
        std::string text = emit_equation(n);
        art.equation_modules.emplace_back(sanitize_ident(n.name),
                                          std::move(text));
    }
    art.top = emit_top();

    // Expand library dependencies, then freeze the file list.
    std::set<std::string> refs = lib_refs;
    for (const std::string& m : lib_refs) {
        auto it = lib_deps().find(m);
        if (it != lib_deps().end())
            refs.insert(it->second.begin(), it->second.end());
    }
    for (const std::string& m : refs) art.library_files.push_back(m + ".v");

    art.manifest = emit_manifest();
    art.hw_tcl = emit_hw_tcl();
    art.dot = emit_dot(d.dfg, art.design);
    art.external_modules.assign(externals.begin(), externals.end());
    closure_check();
}

}  // namespace

HdlArtifactSet emit_artifacts(const CompiledDesign& d, const EmitOptions& opt) {
    Emitter e(d, opt);
    e.run();
    return std::move(e.art);
}

std::string emit_dot(const Dfg& dfg, const std::string& name) {
    std::ostringstream os;
    os << "digraph " << sanitize_ident(name) << " {\n";
    os << "  rankdir=LR;\n";
    os << "  node [fontname=\"Helvetica\", fontsize=10];\n";
    for (const DfgNode& n : dfg.nodes) {
        os << "  n" << n.id << " [label=\"" << n.name;
        const char* shape = "box";
        const char* style = nullptr;
        switch (n.kind) {
            case DfgNodeKind::InputPort:
            case DfgNodeKind::OutputPort:
                shape = "ellipse";
                style = "dashed";
                break;
            case DfgNodeKind::EquationModule:
                os << "\\n(" << n.latency << ")";
                shape = "circle";
                break;
            case DfgNodeKind::HdlInstance:
                os << "\\n(" << n.latency << ")";
                break;
            case DfgNodeKind::DelayModule:
                os << "\\n" << n.latency << " cyc";
                style = "filled";
                break;
            case DfgNodeKind::FormatConverter:
                os << "\\n(" << n.latency << ")";
                style = "rounded";
                break;
        }
        os << "\", shape=" << shape;
        if (style) {
            os << ", style=" << style;
            if (std::string(style) == "filled") os << ", fillcolor=gray85";
        }
        os << "];\n";
    }
    for (const DfgEdge& e : dfg.edges) {
        os << "  n" << e.src_node << " -> n" << e.dst_node << " [label=\""
           << e.var;
        if (e.bits) {
            if (e.bits->first == e.bits->second)
                os << "[" << e.bits->first << "]";
            else
                os << "[" << e.bits->first << ":" << e.bits->second << "]";
        }
        os << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

void write_artifacts(const HdlArtifactSet& a, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir + "/eq", ec);
    if (ec) fail(Errc::IoError, "cannot create '" + out_dir + "/eq'");
    if (!a.library_files.empty()) {
        fs::create_directories(out_dir + "/hdl_lib", ec);
        if (ec)
            fail(Errc::IoError, "cannot create '" + out_dir + "/hdl_lib'");
    }
    auto put = [](const std::string& path, std::string_view text) {
        std::ofstream os(path, std::ios::binary);
        if (!os ||
            !os.write(text.data(), static_cast<std::streamsize>(text.size())))
            fail(Errc::IoError, "cannot write '" + path + "'");
    };
    put(out_dir + "/top.v", a.top);
    for (const auto& [label, text] : a.equation_modules)
        put(out_dir + "/eq/" + label + ".v", text);
    put(out_dir + "/manifest.txt", a.manifest);
    put(out_dir + "/hw.tcl", a.hw_tcl);
    put(out_dir + "/dfg.dot", a.dot);
    for (const std::string& f : a.library_files) {
        bool found = false;
        for (const auto& [name, text] : hdl_library_files()) {
            if (name == f) {
                put(out_dir + "/hdl_lib/" + f, text);
                found = true;
                break;
            }
        }
        if (!found)
            fail(Errc::SizeMismatch,
                 "internal: library file '" + f + "' is not embedded");
    }
}

}  // namespace spdc
