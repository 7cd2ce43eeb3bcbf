#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spdc/dfg.hpp"

namespace spdc {

// One physical delay line serving every lagging consumer of a source pin.
// Taps sit at each required depth; the line is as long as the deepest tap.
struct DelayChain {
    int src_node = -1;
    int src_pin = -1;
    std::optional<std::pair<int, int>> bits;  // slice applied ahead of the line
    int width = 32;
    std::vector<int> taps;           // ascending required delays
    std::vector<int> segment_nodes;  // DelayModule ids, one per tap step
    bool memory_based = false;       // long enough to warrant block RAM

    int total_cycles() const { return taps.empty() ? 0 : taps.back(); }
};

// Record of one balanced edge: which consumer pin was padded and by how
// much. Kept for reports and tests; the graph itself holds the DelayModules.
struct InsertedDelay {
    std::string var;
    int dst_node = -1;
    int dst_pin = -1;
    int cycles = 0;
};

struct BalanceOptions {
    bool share_chains = true;
    int memory_threshold = 32;  // chain length at which block RAM is assumed
};

struct Schedule {
    std::vector<int> ready;    // per node id: cycle its inputs are complete
    std::vector<int> arrival;  // per node id: cycle its outputs are produced
    int pipeline_depth = 0;    // stream-in to stream-out cycles

    std::vector<InsertedDelay> inserted;
    std::vector<DelayChain> chains;
    double delay_word_cycles = 0.0;  // Σ chain length × width/32

    int num_chains() const { return static_cast<int>(chains.size()); }
};

/// Longest-path arrival times over the graph as it stands: ready = max of
/// the producers' arrivals (0 with no inputs), arrival = ready + latency.
/// Requires every node latency to be resolved.
void compute_arrivals(Dfg& dfg, std::vector<int>& ready,
                      std::vector<int>& arrival);

/// Balance the pipeline: pad every lagging edge with a DelayModule so each
/// node's inputs are cycle-synchronized, bring all output ports to the same
/// depth, then merge fan-out delays into tapped chains (unless disabled).
/// The result is a fixpoint: balancing an already-balanced graph inserts
/// nothing.
Schedule balance(Dfg& dfg, const BalanceOptions& opt = {});

}  // namespace spdc
