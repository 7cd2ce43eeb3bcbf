#pragma once

#include <string>
#include <utility>
#include <vector>

#include "spdc/compile.hpp"

namespace spdc {

// Everything the back end produces for one design, as in-memory text:
// the top module, one module per equation pipeline, the component
// description (plain manifest plus tcl flavor), and the graph drawing.
struct HdlArtifactSet {
    std::string design;  // sanitized top-level module name
    std::string top;
    std::vector<std::pair<std::string, std::string>> equation_modules;
    std::string manifest;
    std::string hw_tcl;
    std::string dot;
    std::vector<std::string> library_files;     // hdl_lib/*.v referenced
    std::vector<std::string> external_modules;  // user HDL, not shipped
};

struct EmitOptions {
    long long epoch = 0;  // build timestamp (seconds since 1970, UTC)
};

/// Render all artifacts for a balanced design. Deterministic: identical
/// designs and epoch produce byte-identical text. A closure check verifies
/// every instantiated module resolves to an emitted module, a shipped
/// library file, or a declared external module.
HdlArtifactSet emit_artifacts(const CompiledDesign& d,
                              const EmitOptions& opt = {});

/// Graphviz view of a graph: circles for equation modules, rectangles for
/// HDL instances, filled rectangles for inserted delays, rounded boxes for
/// format converters, dashed ellipses for ports.
std::string emit_dot(const Dfg& dfg, const std::string& name);

/// Write the artifact tree: <dir>/top.v, <dir>/eq/<label>.v, <dir>/hw.tcl,
/// <dir>/manifest.txt, <dir>/dfg.dot, <dir>/hdl_lib/<file> for every
/// referenced library module.
void write_artifacts(const HdlArtifactSet& a, const std::string& out_dir);

}  // namespace spdc
