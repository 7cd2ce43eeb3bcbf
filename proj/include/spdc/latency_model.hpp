#pragma once

#include <string>
#include <vector>

#include "spdc/diag.hpp"

namespace spdc {

// Pipeline depths (cycles) of the floating-point operator cores at one
// target frequency.
struct OpLatencies {
    int add = 3;
    int sub = 3;
    int mul = 2;
    int const_mul = 2;
    int div = 12;
    int converter_in = 1;
    int converter_out = 1;
};

struct LatencyTier {
    int max_frequency_mhz = 125;
    OpLatencies ops;
};

// Frequency-tiered operator latency table. Deeper pipelines are required to
// close timing at higher clock rates, so every field is non-decreasing from
// tier to tier.
struct LatencyModel {
    std::vector<LatencyTier> tiers;  // ascending max_frequency_mhz

    // Built-in table: 125 / 250 / 500 MHz tiers.
    static LatencyModel defaults();

    // Load from a JSON file; schema documented in docs/latency-model.md.
    // Fails with BAD_LATENCY_MODEL on malformed or non-monotone tables and
    // FILE_NOT_FOUND when the file is missing.
    static LatencyModel load(const std::string& path);

    // Smallest tier whose max_frequency_mhz covers the request. Requests
    // above the top tier fail with FREQ_ABOVE_MODEL.
    const LatencyTier& select(int freq_mhz) const;

    // Enforce ordering, positivity and monotonicity invariants.
    void validate() const;
};

}  // namespace spdc
