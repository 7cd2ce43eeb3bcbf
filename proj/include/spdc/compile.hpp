#pragma once

#include <map>
#include <string>

#include "spdc/ast.hpp"
#include "spdc/balancer.hpp"
#include "spdc/dfg.hpp"
#include "spdc/expr_synth.hpp"
#include "spdc/latency_model.hpp"

namespace spdc {

struct CompileOptions {
    int freq_mhz = 125;
    std::string latency_model_path;  // empty = built-in tier table
    bool share_chains = true;
    int memory_threshold = 32;
    bool run_balancer = true;  // off: stop after lowering (pre-balance view)
};

// Everything the back ends need: the parsed program, the lowered and
// (normally) balanced graph, the operator DAGs per equation node, and the
// latency tier that drove the lowering.
struct CompiledDesign {
    SpdProgram program;
    Dfg dfg;
    std::map<int, OperatorDag> equations;
    LatencyTier tier;
    Schedule schedule;
    CompileOptions options;
};

/// Front-to-back compilation of SPD source text: parse, build the dataflow
/// graph, auto-route the framing sideband, wrap numeric ports in format
/// converters, lower equations against the selected tier, topologically
/// order, then balance. `filename` is used in diagnostics only.
CompiledDesign compile_spd(const std::string& source,
                           const std::string& filename,
                           const CompileOptions& opt = {});

CompiledDesign compile_spd_file(const std::string& path,
                                const CompileOptions& opt = {});

/// Whole-file read; FILE_NOT_FOUND / IO_ERROR on failure.
std::string read_text_file(const std::string& path);

}  // namespace spdc
