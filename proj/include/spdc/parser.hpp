#pragma once

#include <string_view>
#include <vector>

#include "spdc/ast.hpp"
#include "spdc/lexer.hpp"

namespace spdc {

/// Parse a whole SPD source file. Statements are newline-terminated (after
/// `\` continuation joining); a trailing `;` is accepted and ignored. Checks
/// performed here: reserved-label handling, duplicate Name / Param / node
/// labels, at most one valid/sop/eop port per direction, and the rule that
/// HDL arguments are variables (parameters must be routed through an
/// equation). Dataflow-level checks live in the graph builder.
SpdProgram parse_program(std::string_view source);
SpdProgram parse_program(const std::vector<Token>& tokens);

/// Parse a single arithmetic expression (used by tests and tools). Variable
/// references stay ExprKind::Var; call resolve_param_refs to rebind them.
ExprPtr parse_expression(std::string_view text);

/// Rewrite Var leaves whose name matches a declared parameter into ParamRef
/// leaves. parse_program already applies this to every equation.
void resolve_param_refs(Expr& e, const std::vector<ParamDecl>& params);

}  // namespace spdc
