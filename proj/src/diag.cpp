#include "spdc/diag.hpp"

#include <sstream>

namespace spdc {

std::string_view errc_name(Errc code) {
    switch (code) {
        case Errc::IllegalCharacter: return "ILLEGAL_CHARACTER";
        case Errc::SyntaxError: return "SYNTAX_ERROR";
        case Errc::DuplicateNameDecl: return "DUPLICATE_NAME_DECL";
        case Errc::DuplicateNodeLabel: return "DUPLICATE_NODE_LABEL";
        case Errc::UnknownModuleKind: return "UNKNOWN_MODULE_KIND";
        case Errc::MultipleAssignment: return "MULTIPLE_ASSIGNMENT";
        case Errc::BadNumber: return "BAD_NUMBER";
        case Errc::BadBitRange: return "BAD_BIT_RANGE";
        case Errc::UndefinedVariable: return "UNDEFINED_VARIABLE";
        case Errc::MultiplyDefinedVariable: return "MULTIPLY_DEFINED_VARIABLE";
        case Errc::CycleDetected: return "CYCLE_DETECTED";
        case Errc::DanglingOutput: return "DANGLING_OUTPUT";
        case Errc::ControlPortConflict: return "CONTROL_PORT_CONFLICT";
        case Errc::WidthMismatch: return "WIDTH_MISMATCH";
        case Errc::FreqAboveModel: return "FREQ_ABOVE_MODEL";
        case Errc::BadLatencyModel: return "BAD_LATENCY_MODEL";
        case Errc::MissingPlugin: return "MISSING_PLUGIN";
        case Errc::PluginLatencyMismatch: return "PLUGIN_LATENCY_MISMATCH";
        case Errc::ParamMissing: return "PARAM_MISSING";
        case Errc::BadStreamFile: return "BAD_STREAM_FILE";
        case Errc::SizeMismatch: return "SIZE_MISMATCH";
        case Errc::NameCollision: return "NAME_COLLISION";
        case Errc::FileNotFound: return "FILE_NOT_FOUND";
        case Errc::IoError: return "IO_ERROR";
    }
    return "UNKNOWN_ERROR";
}

std::string CompileError::format(std::string_view file) const {
    std::ostringstream os;
    if (!file.empty()) os << file << ":";
    if (loc_.valid()) os << loc_.line << ":" << loc_.column << ":";
    if (!file.empty() || loc_.valid()) os << " ";
    os << errc_name(code_) << ": " << what();
    return os.str();
}

}  // namespace spdc
