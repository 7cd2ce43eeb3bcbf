#pragma once

#include <string>
#include <vector>

#include "spdc/compile.hpp"

namespace spdc {

// Compile summary: throughput estimate, operator totals, balancing cost and
// the per-node schedule. Rendered as aligned text and as JSON side by side.
struct BuildReport {
    std::string design;
    int freq_mhz = 0;
    int tier_mhz = 0;
    int pipeline_depth = 0;

    OperatorCensus census;
    int n_ops = 0;
    double est_gflops = 0.0;  // freq_mhz/1000 * n_ops, exact

    int inserted_delays = 0;  // padded edges
    int delay_chains = 0;
    double delay_word_cycles = 0.0;
    long long register_bits_estimate = 0;  // 32*(operator stages + delays)

    struct Row {
        std::string node;
        std::string kind;
        int latency = 0;
        int ready = 0;
        int arrival = 0;
    };
    std::vector<Row> schedule;
};

BuildReport make_report(const CompiledDesign& d, const std::string& design);

std::string report_text(const BuildReport& r);
std::string report_json(const BuildReport& r);

/// The throughput figure at one decimal place ("16.4" for 16.375).
std::string format_gflops(double est_gflops);

}  // namespace spdc
