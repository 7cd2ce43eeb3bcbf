#include "spdc/balancer.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace spdc {

void compute_arrivals(Dfg& dfg, std::vector<int>& ready,
                      std::vector<int>& arrival) {
    topo_sort(dfg);
    ready.assign(dfg.nodes.size(), 0);
    arrival.assign(dfg.nodes.size(), 0);
    for (int id : dfg.topo_order) {
        const DfgNode& n = dfg.node(id);
        int r = 0;
        for (int eid : n.in_edge)
            if (eid >= 0)
                r = std::max(r, arrival[static_cast<size_t>(
                                    dfg.edge(eid).src_node)]);
        ready[static_cast<size_t>(id)] = r;
        arrival[static_cast<size_t>(id)] = r + n.latency;
    }
}

namespace {

// Consumers of one (source pin, slice) that need padding, grouped so they
// can share one tapped line.
struct PadGroup {
    int src_node;
    int src_pin;
    std::optional<std::pair<int, int>> bits;
    int width;
    std::vector<std::pair<int, int>> edges;  // (edge id, required cycles)
};

}  // namespace

Schedule balance(Dfg& dfg, const BalanceOptions& opt) {
    Schedule s;
    compute_arrivals(dfg, s.ready, s.arrival);

    // All output ports leave together at the depth of the slowest one.
    for (int id : dfg.output_ports)
        s.pipeline_depth =
            std::max(s.pipeline_depth, s.arrival[static_cast<size_t>(id)]);

    // Required input time per node: its ready time, except output ports
    // which all wait for the full pipeline.
    auto required = [&](int node_id) {
        return dfg.node(node_id).kind == DfgNodeKind::OutputPort
                   ? s.pipeline_depth
                   : s.ready[static_cast<size_t>(node_id)];
    };

    // Group lagging edges by source pin and slice. Iterate edges in id order
    // so construction is deterministic.
    std::vector<PadGroup> groups;
    std::map<std::tuple<int, int, int, int>, size_t> group_index;
    for (const auto& e : dfg.edges) {
        int lag = required(e.dst_node) - s.arrival[static_cast<size_t>(e.src_node)];
        if (lag <= 0) continue;
        s.inserted.push_back({e.var, e.dst_node, e.dst_pin, lag});
        std::tuple<int, int, int, int> key{
            e.src_node, e.src_pin, e.bits ? e.bits->first : -1,
            e.bits ? e.bits->second : -1};
        auto it = group_index.find(key);
        if (it == group_index.end()) {
            PadGroup g;
            g.src_node = e.src_node;
            g.src_pin = e.src_pin;
            g.bits = e.bits;
            g.width = e.width;
            it = group_index.emplace(key, groups.size()).first;
            groups.push_back(std::move(g));
        }
        groups[it->second].edges.push_back({e.id, lag});
    }

    auto build_chain = [&](const PadGroup& g,
                           const std::vector<std::pair<int, int>>& edges) {
        DelayChain chain;
        chain.src_node = g.src_node;
        chain.src_pin = g.src_pin;
        chain.bits = g.bits;
        chain.width = g.width;
        std::set<int> depths;
        for (auto [eid, lag] : edges) depths.insert(lag);
        chain.taps.assign(depths.begin(), depths.end());

        // Copy: adding edges below may reallocate the edge table.
        const std::string var = dfg.edge(edges.front().first).var;
        PortClass cls = dfg.node(g.src_node)
                            .out_pins[static_cast<size_t>(g.src_pin)]
                            .cls;
        int prev_node = g.src_node;
        int prev_pin = g.src_pin;
        int prev_depth = 0;
        bool first_segment = true;
        for (int tap : chain.taps) {
            int seg = dfg.add_node(
                DfgNodeKind::DelayModule,
                "dly" + std::to_string(dfg.nodes.size()) + "_" + var);
            DfgNode& d = dfg.node(seg);
            d.latency = tap - prev_depth;
            d.in_pins.push_back({var, cls, g.width});
            d.out_pins.push_back({var, cls, g.width});
            d.in_edge.assign(1, -1);
            d.out_edges.assign(1, {});
            dfg.add_edge(prev_node, prev_pin, seg, 0, var,
                         first_segment ? g.bits : std::nullopt);
            chain.segment_nodes.push_back(seg);
            // Retarget every consumer requiring exactly `tap` cycles.
            for (auto [eid, lag] : edges) {
                if (lag != tap) continue;
                DfgEdge& e = dfg.edge(eid);
                auto& fanout =
                    dfg.node(e.src_node).out_edges[static_cast<size_t>(e.src_pin)];
                fanout.erase(std::find(fanout.begin(), fanout.end(), eid));
                e.src_node = seg;
                e.src_pin = 0;
                e.bits.reset();
                dfg.node(seg).out_edges[0].push_back(eid);
            }
            prev_node = seg;
            prev_pin = 0;
            prev_depth = tap;
            first_segment = false;
        }
        chain.memory_based = chain.total_cycles() >= opt.memory_threshold;
        s.delay_word_cycles += chain.total_cycles() * (g.width / 32.0);
        s.chains.push_back(std::move(chain));
    };

    for (const auto& g : groups) {
        if (opt.share_chains) {
            build_chain(g, g.edges);
        } else {
            for (const auto& e : g.edges)
                build_chain(g, {e});
        }
    }

    // The graph changed; refresh times so callers see the balanced schedule.
    compute_arrivals(dfg, s.ready, s.arrival);
    for (int id : dfg.output_ports)
        if (s.arrival[static_cast<size_t>(id)] != s.pipeline_depth)
            fail(Errc::SizeMismatch, dfg.node(id).loc,
                 "internal: output '" + dfg.node(id).name +
                     "' missed the pipeline depth after balancing");
    return s;
}

}  // namespace spdc
