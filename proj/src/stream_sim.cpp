// Cycle-accurate simulation of a balanced pipeline graph.
//
// The model mirrors the generated hardware: every register in the design
// shares one clock-enable, CE = out_ready | ~out_valid. Each tick has two
// phases. The peek phase walks the graph in topological order and computes
// the word currently visible on every output pin: zero-latency nodes
// combinationally from their inputs, registered nodes from stored state.
// The interface signals (out_valid, output words) are sampled from that
// snapshot, CE is decided, and only then does the commit phase push the
// snapshot into the registers. Freezing commits on stalled cycles makes
// back-pressure value-invariant by construction.

#include "spdc/stream_sim.hpp"

#include <algorithm>
#include <cassert>
#include <random>
#include <set>
#include <utility>

#include "spdc/diag.hpp"

namespace spdc {

void PluginRegistry::add(const std::string& module, PluginFactory factory) {
    factories_[module] = std::move(factory);
}

bool PluginRegistry::has(std::string_view module) const {
    return factories_.find(module) != factories_.end();
}

std::unique_ptr<HdlPlugin> PluginRegistry::create(const HdlCall& call) const {
    auto it = factories_.find(call.module);
    if (it == factories_.end()) {
        fail(Errc::MissingPlugin, call.loc,
             "no simulation model registered for HDL module '" + call.module +
                 "'");
    }
    return it->second(call);
}

// ---------------------------------------------------------------------------

namespace {

// Shift register of `length` words, zeroed at reset like hardware registers.
struct Pipe {
    std::vector<uint32_t> buf;
    size_t pos = 0;

    void init(int length) {
        buf.assign(static_cast<size_t>(length), 0u);
        pos = 0;
    }
    uint32_t front() const { return buf[pos]; }
    void push(uint32_t v) {
        buf[pos] = v;
        pos = (pos + 1) % buf.size();
    }
};

}  // namespace

struct StreamSimulator::Impl {
    Dfg dfg;
    std::map<int, OperatorDag> equations;
    int depth = 0;

    struct HdlState {
        int node = -1;
        HdlCall call;
        std::unique_ptr<HdlPlugin> plugin;
        std::vector<uint32_t> in_buf, out_buf;
    };
    std::vector<HdlState> hdls;
    std::map<int, size_t> hdl_of_node;
    // Copied, not referenced: reset() re-instantiates plugins long after the
    // constructor's argument may have gone away.
    PluginRegistry registry;

    // Interface layout.
    std::vector<int> data_in, data_out;  // port node ids, declaration order
    std::vector<std::string> in_fields, out_fields;
    std::map<int, size_t> field_of_port;  // input port node -> field index
    int vld_out = -1, sop_out = -1, eop_out = -1;  // -1: synthesized sideband
    std::vector<std::pair<std::string, std::string>> layout;

    // dag input index -> node in-pin index, per equation node
    std::map<int, std::vector<size_t>> eq_pin_of_input;

    // Live state.
    std::vector<std::vector<uint32_t>> visible;   // [node][out pin]
    std::vector<std::vector<uint32_t>> gathered;  // [node][in pin]
    std::map<int, Pipe> pipes;                    // registered non-HDL nodes
    Pipe vld_pipe, sop_pipe, eop_pipe;            // synthesized sideband
    int64_t cycle = 0;

    void build(const SpdProgram& program);
    void reset();
    uint32_t edge_value(int eid) const;
    void gather(const DfgNode& n);
    void peek_pass(bool in_valid, const std::vector<uint32_t>* in_words,
                   bool in_sop, bool in_eop);
    void commit_pass(bool in_valid, bool in_sop, bool in_eop);
    uint32_t port_value(int port_node) const;
    CycleIo tick(const std::vector<uint32_t>* in_words, bool in_sop,
                 bool in_eop, bool out_ready);
};

void StreamSimulator::Impl::build(const SpdProgram& program) {
    for (int id : dfg.input_ports) {
        const DfgNode& n = dfg.node(id);
        PortClass cls = n.out_pins[0].cls;
        if (cls == PortClass::Numeric || cls == PortClass::Raw) {
            field_of_port[id] = in_fields.size();
            data_in.push_back(id);
            in_fields.push_back(n.name);
        }
    }
    for (int id : dfg.output_ports) {
        const DfgNode& n = dfg.node(id);
        switch (n.in_pins[0].cls) {
            case PortClass::Vld: vld_out = id; break;
            case PortClass::Sop: sop_out = id; break;
            case PortClass::Eop: eop_out = id; break;
            default:
                data_out.push_back(id);
                out_fields.push_back(n.name);
                break;
        }
    }

    for (const DfgNode& n : dfg.nodes) {
        for (const DfgPin& p : n.out_pins) layout.emplace_back(n.name, p.name);
        if (n.kind == DfgNodeKind::HdlInstance) {
            HdlState hs;
            hs.node = n.id;
            hs.call = program.nodes[static_cast<size_t>(n.decl_index)].call;
            hs.plugin = registry.create(hs.call);
            if (hs.plugin->latency() != n.latency) {
                fail(Errc::PluginLatencyMismatch, n.loc,
                     "HDL module '" + hs.call.module + "' instance '" + n.name +
                         "' declares delay " + std::to_string(n.latency) +
                         " but its simulation model has latency " +
                         std::to_string(hs.plugin->latency()));
            }
            hs.in_buf.assign(n.in_pins.size(), 0u);
            hs.out_buf.assign(n.out_pins.size(), 0u);
            hdl_of_node[n.id] = hdls.size();
            hdls.push_back(std::move(hs));
        } else if (n.kind == DfgNodeKind::EquationModule) {
            auto it = equations.find(n.id);
            if (it == equations.end()) {
                fail(Errc::SizeMismatch, n.loc,
                     "internal: equation node '" + n.name +
                         "' has no lowered operator graph");
            }
            std::vector<size_t> map;
            map.reserve(it->second.inputs.size());
            for (const std::string& v : it->second.inputs) {
                size_t pin = n.in_pins.size();
                for (size_t p = 0; p < n.in_pins.size(); ++p) {
                    if (n.in_pins[p].name == v) { pin = p; break; }
                }
                if (pin == n.in_pins.size()) {
                    fail(Errc::SizeMismatch, n.loc,
                         "internal: equation input '" + v +
                             "' has no matching pin on node '" + n.name + "'");
                }
                map.push_back(pin);
            }
            eq_pin_of_input[n.id] = std::move(map);
        }
    }
    reset();
}

void StreamSimulator::Impl::reset() {
    visible.assign(dfg.nodes.size(), {});
    gathered.assign(dfg.nodes.size(), {});
    for (const DfgNode& n : dfg.nodes) {
        visible[static_cast<size_t>(n.id)].assign(n.out_pins.size(), 0u);
        gathered[static_cast<size_t>(n.id)].assign(n.in_pins.size(), 0u);
    }
    pipes.clear();
    for (const DfgNode& n : dfg.nodes) {
        if (n.kind == DfgNodeKind::HdlInstance ||
            n.kind == DfgNodeKind::InputPort ||
            n.kind == DfgNodeKind::OutputPort) {
            continue;
        }
        if (n.latency > 0) pipes[n.id].init(n.latency);
    }
    for (HdlState& hs : hdls) {
        hs.plugin = registry.create(hs.call);
        std::fill(hs.in_buf.begin(), hs.in_buf.end(), 0u);
        std::fill(hs.out_buf.begin(), hs.out_buf.end(), 0u);
    }
    if (depth > 0) {
        vld_pipe.init(depth);
        sop_pipe.init(depth);
        eop_pipe.init(depth);
    }
    cycle = 0;
}

uint32_t StreamSimulator::Impl::edge_value(int eid) const {
    const DfgEdge& e = dfg.edge(eid);
    uint32_t w = visible[static_cast<size_t>(e.src_node)]
                        [static_cast<size_t>(e.src_pin)];
    if (e.bits) {
        int lsb = e.bits->second;
        int width = e.bits->first - lsb + 1;
        uint32_t mask = width >= 32 ? ~0u : ((1u << width) - 1u);
        w = (w >> lsb) & mask;
    }
    return w;
}

void StreamSimulator::Impl::gather(const DfgNode& n) {
    auto& g = gathered[static_cast<size_t>(n.id)];
    for (size_t p = 0; p < n.in_pins.size(); ++p) {
        int eid = n.in_edge[p];
        g[p] = eid >= 0 ? edge_value(eid) : 0u;
    }
}

void StreamSimulator::Impl::peek_pass(bool in_valid,
                                      const std::vector<uint32_t>* in_words,
                                      bool in_sop, bool in_eop) {
    for (int id : dfg.topo_order) {
        const DfgNode& n = dfg.node(id);
        auto& vis = visible[static_cast<size_t>(id)];
        switch (n.kind) {
            case DfgNodeKind::InputPort: {
                switch (n.out_pins[0].cls) {
                    case PortClass::Vld:
                        vis[0] = in_valid ? 1u : 0u;
                        break;
                    case PortClass::Sop:
                        vis[0] = (in_valid && in_sop) ? 1u : 0u;
                        break;
                    case PortClass::Eop:
                        vis[0] = (in_valid && in_eop) ? 1u : 0u;
                        break;
                    default:
                        vis[0] = in_valid
                                     ? (*in_words)[field_of_port.at(id)]
                                     : 0u;
                        break;
                }
                break;
            }
            case DfgNodeKind::OutputPort:
                gather(n);
                break;
            case DfgNodeKind::EquationModule: {
                gather(n);
                if (n.latency > 0) {
                    vis[0] = pipes.at(id).front();
                } else {
                    const OperatorDag& dag = equations.at(id);
                    const auto& map = eq_pin_of_input.at(id);
                    std::vector<float> in(map.size());
                    const auto& g = gathered[static_cast<size_t>(id)];
                    for (size_t i = 0; i < map.size(); ++i)
                        in[i] = word_to_float(g[map[i]]);
                    vis[0] = float_to_word(eval_dag(dag, in));
                }
                break;
            }
            case DfgNodeKind::DelayModule:
            case DfgNodeKind::FormatConverter: {
                gather(n);
                vis[0] = n.latency > 0
                             ? pipes.at(id).front()
                             : gathered[static_cast<size_t>(id)][0];
                break;
            }
            case DfgNodeKind::HdlInstance: {
                gather(n);
                HdlState& hs = hdls[hdl_of_node.at(id)];
                hs.in_buf = gathered[static_cast<size_t>(id)];
                hs.plugin->peek(hs.in_buf, hs.out_buf);
                for (size_t p = 0; p < vis.size(); ++p) vis[p] = hs.out_buf[p];
                break;
            }
        }
    }
}

void StreamSimulator::Impl::commit_pass(bool in_valid, bool in_sop,
                                        bool in_eop) {
    for (int id : dfg.topo_order) {
        const DfgNode& n = dfg.node(id);
        switch (n.kind) {
            case DfgNodeKind::EquationModule: {
                if (n.latency == 0) break;
                const OperatorDag& dag = equations.at(id);
                const auto& map = eq_pin_of_input.at(id);
                std::vector<float> in(map.size());
                const auto& g = gathered[static_cast<size_t>(id)];
                for (size_t i = 0; i < map.size(); ++i)
                    in[i] = word_to_float(g[map[i]]);
                pipes.at(id).push(float_to_word(eval_dag(dag, in)));
                break;
            }
            case DfgNodeKind::DelayModule:
            case DfgNodeKind::FormatConverter:
                if (n.latency > 0)
                    pipes.at(id).push(gathered[static_cast<size_t>(id)][0]);
                break;
            case DfgNodeKind::HdlInstance: {
                HdlState& hs = hdls[hdl_of_node.at(id)];
                hs.plugin->advance(gathered[static_cast<size_t>(id)]);
                break;
            }
            default:
                break;
        }
    }
    if (depth > 0) {
        vld_pipe.push(in_valid ? 1u : 0u);
        sop_pipe.push((in_valid && in_sop) ? 1u : 0u);
        eop_pipe.push((in_valid && in_eop) ? 1u : 0u);
    }
}

uint32_t StreamSimulator::Impl::port_value(int port_node) const {
    const DfgNode& n = dfg.node(port_node);
    int eid = n.in_edge[0];
    if (eid < 0) return 0u;
    return edge_value(eid);
}

CycleIo StreamSimulator::Impl::tick(const std::vector<uint32_t>* in_words,
                                    bool in_sop, bool in_eop,
                                    bool out_ready) {
    bool in_valid = in_words != nullptr;
    peek_pass(in_valid, in_words, in_sop, in_eop);

    CycleIo io;
    io.out_ready = out_ready;
    if (vld_out >= 0) {
        io.out_valid = (port_value(vld_out) & 1u) != 0;
    } else {
        io.out_valid = depth > 0 ? vld_pipe.front() != 0 : in_valid;
    }
    if (sop_out >= 0) {
        io.out_sop = (port_value(sop_out) & 1u) != 0;
    } else {
        io.out_sop = depth > 0 ? sop_pipe.front() != 0 : (in_valid && in_sop);
    }
    if (eop_out >= 0) {
        io.out_eop = (port_value(eop_out) & 1u) != 0;
    } else {
        io.out_eop = depth > 0 ? eop_pipe.front() != 0 : (in_valid && in_eop);
    }
    io.out_words.resize(data_out.size());
    for (size_t i = 0; i < data_out.size(); ++i)
        io.out_words[i] = port_value(data_out[i]);

    io.in_ready = out_ready || !io.out_valid;  // shared clock-enable
    io.transfer = io.out_valid && out_ready;
    io.accepted = in_valid && io.in_ready;
    if (io.in_ready) {
        commit_pass(in_valid, in_sop, in_eop);
        ++cycle;
    }
    return io;
}

// ---------------------------------------------------------------------------

StreamSimulator::StreamSimulator(const Dfg& dfg, const SpdProgram& program,
                                 const std::map<int, OperatorDag>& equations,
                                 int pipeline_depth,
                                 const PluginRegistry& plugins)
    : impl_(std::make_unique<Impl>()) {
    impl_->dfg = dfg;
    impl_->equations = equations;
    impl_->depth = pipeline_depth;
    impl_->registry = plugins;
    impl_->build(program);
}

StreamSimulator::~StreamSimulator() = default;

const std::vector<std::string>& StreamSimulator::input_fields() const {
    return impl_->in_fields;
}

const std::vector<std::string>& StreamSimulator::output_fields() const {
    return impl_->out_fields;
}

const std::vector<std::pair<std::string, std::string>>&
StreamSimulator::pin_layout() const {
    return impl_->layout;
}

void StreamSimulator::reset() { impl_->reset(); }

CycleIo StreamSimulator::tick(const std::vector<uint32_t>* in_words,
                              bool in_sop, bool in_eop, bool out_ready) {
    return impl_->tick(in_words, in_sop, in_eop, out_ready);
}

SimResult StreamSimulator::run(const Stream& input, const SimOptions& opt) {
    if (!input.fields.empty() && input.fields != impl_->in_fields) {
        fail(Errc::SizeMismatch,
             "input stream fields do not match the design's input ports");
    }
    for (const auto& row : input.data) {
        if (row.size() != impl_->in_fields.size()) {
            fail(Errc::SizeMismatch,
                 "input vector has " + std::to_string(row.size()) +
                     " words, design expects " +
                     std::to_string(impl_->in_fields.size()));
        }
    }
    impl_->reset();

    std::set<int64_t> stall_at(opt.stall_cycles.begin(),
                               opt.stall_cycles.end());
    std::mt19937 rng(opt.stall_seed);
    const bool duty_stalls =
        opt.stall_duty.has_value() && *opt.stall_duty > 0.0;
    const uint64_t duty_threshold =
        duty_stalls ? static_cast<uint64_t>(*opt.stall_duty * 4294967296.0)
                    : 0;

    SimResult res;
    res.output.fields = impl_->out_fields;
    res.stalled_run = duty_stalls || !stall_at.empty();

    const int64_t n = static_cast<int64_t>(input.size());
    const int64_t cap = (n + impl_->depth + 64) * 8 + 1024;
    std::vector<char> valid_history;

    int64_t next_in = 0;
    int64_t collected = 0;
    int64_t t = 0;
    while (collected < n || (n == 0 && t < impl_->depth + 8)) {
        if (t > cap) {
            fail(Errc::SizeMismatch,
                 "simulation did not drain after " + std::to_string(t) +
                     " cycles (" + std::to_string(collected) + "/" +
                     std::to_string(n) + " outputs)");
        }
        bool stalled = stall_at.count(t) > 0;
        if (duty_stalls)
            stalled |= static_cast<uint64_t>(rng()) < duty_threshold;

        const std::vector<uint32_t>* in =
            next_in < n ? &input.data[static_cast<size_t>(next_in)] : nullptr;
        bool in_sop = in && input.sop[static_cast<size_t>(next_in)] != 0;
        bool in_eop = in && input.eop[static_cast<size_t>(next_in)] != 0;

        CycleIo io = impl_->tick(in, in_sop, in_eop, !stalled);

        if (io.out_valid && res.depth_observed < 0) res.depth_observed = t;
        valid_history.push_back(io.out_valid ? 1 : 0);
        if (t < opt.trace_cycles) {
            TraceRow row;
            row.cycle = t;
            row.enabled = io.in_ready;
            row.out_valid = io.out_valid;
            row.outputs = io.out_words;
            for (const auto& per_node : impl_->visible)
                row.pins.insert(row.pins.end(), per_node.begin(),
                                per_node.end());
            res.trace.push_back(std::move(row));
        }
        if (io.transfer) {
            res.output.push(io.out_words, io.out_sop, io.out_eop);
            ++collected;
        }
        if (io.accepted) ++next_in;
        ++t;
    }
    res.cycles_run = t;

    if (!res.stalled_run && n > 0 && res.depth_observed >= 0) {
        bool ok = collected == n;
        for (int64_t c = 0; c < t && ok; ++c) {
            bool expect = c >= res.depth_observed &&
                          c < res.depth_observed + n;
            if ((valid_history[static_cast<size_t>(c)] != 0) != expect)
                ok = false;
        }
        res.throughput_one = ok;
    }
    return res;
}

}  // namespace spdc
