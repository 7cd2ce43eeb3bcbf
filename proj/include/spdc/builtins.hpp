#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spdc/ast.hpp"

namespace spdc {

// Fixed port shape of one library HDL module. Widths are resolved against
// the call's parameter list (mMux and mDelay honor .pWidth).
struct BuiltinShape {
    std::string_view module;
    std::vector<int> in_widths;
    std::vector<int> out_widths;
};

/// Shape of a library module for a concrete call, or nullopt for user
/// modules (whose pins all default to 32 bits). Fails with SIZE_MISMATCH
/// when the call's argument or result count disagrees with the library
/// definition.
std::optional<BuiltinShape> builtin_shape(const HdlCall& call);

/// True when `module` names a library module with built-in simulation
/// behavior and a shipped Verilog implementation.
bool is_builtin_module(std::string_view module);

/// Pipeline latency of a library module for a concrete call:
/// mDelay = .pDelay, mMux = 1, less_than = 1, swap = 0,
/// mTrans = .pUnitLength + 2. Fails with PARAM_MISSING when a required
/// parameter is absent and BAD_NUMBER when one does not parse.
int builtin_latency(const HdlCall& call);

/// Integer value of `.name(...)` in the call's parameter list; `fallback`
/// when absent, error when absent and `fallback` is nullopt.
int hdl_param_int(const HdlCall& call, std::string_view name,
                  std::optional<int> fallback);

}  // namespace spdc
