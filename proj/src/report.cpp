#include "spdc/report.hpp"

#include <cstdio>

#include <nlohmann/json.hpp>

namespace spdc {

BuildReport make_report(const CompiledDesign& d, const std::string& design) {
    BuildReport r;
    r.design = design.empty() ? d.program.name : design;
    r.freq_mhz = d.options.freq_mhz;
    r.tier_mhz = d.tier.max_frequency_mhz;
    r.pipeline_depth = d.schedule.pipeline_depth;

    r.census = census_of(d.equations);
    r.n_ops = r.census.total();
    r.est_gflops = r.freq_mhz / 1000.0 * r.n_ops;

    r.inserted_delays = static_cast<int>(d.schedule.inserted.size());
    r.delay_chains = d.schedule.num_chains();
    r.delay_word_cycles = d.schedule.delay_word_cycles;

    long long bits = 0;
    for (const auto& [node, dag] : d.equations) {
        (void)node;
        for (const OpNode& op : dag.ops) bits += 32LL * op.latency;
        bits += 32LL * dag.internal_delay_cycles;
    }
    for (const DelayChain& c : d.schedule.chains)
        bits += static_cast<long long>(c.total_cycles()) * c.width;
    r.register_bits_estimate = bits;

    for (int id : d.dfg.topo_order) {
        const DfgNode& n = d.dfg.node(id);
        BuildReport::Row row;
        row.node = n.name;
        row.kind = std::string(dfg_node_kind_name(n.kind));
        row.latency = n.latency;
        if (static_cast<size_t>(id) < d.schedule.ready.size()) {
            row.ready = d.schedule.ready[static_cast<size_t>(id)];
            row.arrival = d.schedule.arrival[static_cast<size_t>(id)];
        }
        r.schedule.push_back(std::move(row));
    }
    return r;
}

std::string format_gflops(double est_gflops) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", est_gflops);
    return buf;
}

std::string report_text(const BuildReport& r) {
    std::string out;
    char line[256];
    auto put = [&](const char* fmt, auto&&... args) {
        std::snprintf(line, sizeof line, fmt, args...);
        out += line;
    };
    put("design: %s\n", r.design.c_str());
    put("target: %d MHz (tier <= %d MHz)\n", r.freq_mhz, r.tier_mhz);
    put("pipeline depth: %d cycles\n", r.pipeline_depth);
    put("operators: ADD %d, SUB %d, MUL %d, CONST_MUL %d, DIV %d  (N_ops %d)\n",
        r.census.add, r.census.sub, r.census.mul, r.census.const_mul,
        r.census.div, r.n_ops);
    put("est. throughput: %s GFLOPS (%d MHz x %d ops/cycle)\n",
        format_gflops(r.est_gflops).c_str(), r.freq_mhz, r.n_ops);
    put("delay insertion: %d padded edges, %d chains, %.1f word-cycles\n",
        r.inserted_delays, r.delay_chains, r.delay_word_cycles);
    put("register estimate: %lld bits\n", r.register_bits_estimate);
    out += "\nschedule:\n";
    size_t name_w = 4;
    for (const auto& row : r.schedule) name_w = std::max(name_w, row.node.size());
    put("  %-*s  %-10s  %7s  %6s  %7s\n", static_cast<int>(name_w), "node",
        "kind", "latency", "ready", "arrival");
    for (const auto& row : r.schedule) {
        put("  %-*s  %-10s  %7d  %6d  %7d\n", static_cast<int>(name_w),
            row.node.c_str(), row.kind.c_str(), row.latency, row.ready,
            row.arrival);
    }
    return out;
}

std::string report_json(const BuildReport& r) {
    nlohmann::ordered_json j;
    j["design"] = r.design;
    j["freq_mhz"] = r.freq_mhz;
    j["tier_mhz"] = r.tier_mhz;
    j["pipeline_depth"] = r.pipeline_depth;
    j["census"] = {{"add", r.census.add},
                   {"sub", r.census.sub},
                   {"mul", r.census.mul},
                   {"const_mul", r.census.const_mul},
                   {"div", r.census.div}};
    j["n_ops"] = r.n_ops;
    j["est_gflops"] = r.est_gflops;
    j["est_gflops_display"] = format_gflops(r.est_gflops);
    j["inserted_delays"] = r.inserted_delays;
    j["delay_chains"] = r.delay_chains;
    j["delay_word_cycles"] = r.delay_word_cycles;
    j["register_bits_estimate"] = r.register_bits_estimate;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : r.schedule) {
        rows.push_back({{"node", row.node},
                        {"kind", row.kind},
                        {"latency", row.latency},
                        {"ready", row.ready},
                        {"arrival", row.arrival}});
    }
    j["schedule"] = std::move(rows);
    return j.dump(2) + "\n";
}

}  // namespace spdc
