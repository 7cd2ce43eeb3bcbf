// Diagnostics: error codes, source locations and the exception type used
// across the compiler. Every user-facing failure carries a stable code and a
// file:line:col location so messages stay machine-parsable.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace spdc {

enum class Errc {
    // lexer / parser
    IllegalCharacter,
    SyntaxError,
    DuplicateNameDecl,
    DuplicateNodeLabel,
    UnknownModuleKind,
    MultipleAssignment,
    BadNumber,
    BadBitRange,
    // dataflow graph construction
    UndefinedVariable,
    MultiplyDefinedVariable,
    CycleDetected,
    DanglingOutput,
    ControlPortConflict,
    WidthMismatch,
    // latency model / lowering
    FreqAboveModel,
    BadLatencyModel,
    // simulator
    MissingPlugin,
    PluginLatencyMismatch,
    ParamMissing,
    BadStreamFile,
    SizeMismatch,
    // codegen / cli
    NameCollision,
    FileNotFound,
    IoError,
};

// Stable upper-case token for each code, used verbatim in diagnostics.
std::string_view errc_name(Errc code);

struct SourceLoc {
    int line = 0;    // 1-based; 0 = no location
    int column = 0;  // 1-based

    bool valid() const { return line > 0; }
};

// Thrown for any diagnosed failure. The CLI formats it as
//   <file>:<line>:<col>: <CODE>: <message>
// (file and location omitted when unknown) and exits nonzero.
class CompileError : public std::runtime_error {
public:
    CompileError(Errc code, SourceLoc loc, const std::string& message)
        : std::runtime_error(message), code_(code), loc_(loc) {}

    Errc code() const { return code_; }
    SourceLoc loc() const { return loc_; }

    // One-line rendering including the code token and optional location.
    std::string format(std::string_view file = {}) const;

private:
    Errc code_;
    SourceLoc loc_;
};

[[noreturn]] inline void fail(Errc code, SourceLoc loc, const std::string& message) {
    throw CompileError(code, loc, message);
}

[[noreturn]] inline void fail(Errc code, const std::string& message) {
    throw CompileError(code, SourceLoc{}, message);
}

// Non-fatal findings (unused outputs, zero-extension notes, ...) collected
// during compilation and surfaced in reports.
struct Warning {
    SourceLoc loc;
    std::string message;
};

using WarningList = std::vector<Warning>;

}  // namespace spdc
