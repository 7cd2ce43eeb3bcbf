// Abstract syntax for SPD source: port lists, parameters and the two node
// flavors (floating-point equations and HDL module instances).
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spdc/diag.hpp"

namespace spdc {

// Port classes are carried in the port *name*: a marker `_RAW_`, `_VLD_`,
// `_SOP_` or `_EOP_` anywhere in the name, or the bare suffix `_RAW` etc.,
// selects the class; everything else is a numeric (floating-point) port.
enum class PortClass { Numeric, Raw, Vld, Sop, Eop };

PortClass classify_port(std::string_view name);
std::string_view port_class_name(PortClass pc);

enum class PortDir { Input, Output };

struct PortDecl {
    std::string name;
    PortDir dir = PortDir::Input;
    PortClass cls = PortClass::Numeric;
    int width = 32;  // always 32 at the top level
    SourceLoc loc;
};

struct ParamDecl {
    std::string name;
    float value = 0.0f;       // nearest binary32 of the literal
    std::string literal;      // source spelling, kept for faithful re-emission
    SourceLoc loc;
};

// ---------------------------------------------------------------------------
// Expressions. Plain owned tree; structure mirrors the source parenthesization
// exactly (the compiler never reassociates).

enum class ExprKind { Var, ParamRef, Literal, Unary, Binary };
enum class BinOp { Add, Sub, Mul, Div };

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
    ExprKind kind = ExprKind::Literal;
    SourceLoc loc;

    // Var / ParamRef
    std::string name;
    // Literal
    float value = 0.0f;
    std::string literal;
    // Unary (negation) uses lhs only; Binary uses both.
    BinOp op = BinOp::Add;
    ExprPtr lhs;
    ExprPtr rhs;

    static ExprPtr make_var(std::string n, SourceLoc loc);
    static ExprPtr make_param(std::string n, SourceLoc loc);
    static ExprPtr make_literal(float v, std::string text, SourceLoc loc);
    static ExprPtr make_neg(ExprPtr e, SourceLoc loc);
    static ExprPtr make_bin(BinOp op, ExprPtr l, ExprPtr r, SourceLoc loc);

    ExprPtr clone() const;
};

// Variables read by an expression, in first-use order, excluding names
// present in `params`.
std::vector<std::string> free_variables(const Expr& e,
                                        const std::vector<ParamDecl>& params);

// ---------------------------------------------------------------------------
// Node declarations.

// An input argument of an HDL call: a variable, optionally bit-sliced.
// A slice [k] is stored as msb = lsb = k; absent slice means the full word.
struct HdlArg {
    std::string name;
    std::optional<std::pair<int, int>> bits;  // (msb, lsb)
    SourceLoc loc;

    int width() const { return bits ? bits->first - bits->second + 1 : 32; }
};

// One `.pName(value)` entry of an HDL parameter list. Values are opaque text
// (sized Verilog literals, numbers, parameter names) passed through to
// codegen; the compiler itself parses only the integers it consumes.
struct HdlParam {
    std::string name;
    std::string value;
    SourceLoc loc;
};

struct HdlCall {
    std::string module;               // library / user module name
    std::vector<std::string> outputs;  // produced variables
    std::vector<HdlArg> inputs;
    std::vector<HdlParam> params;
    SourceLoc loc;
};

enum class NodeKind { Equation, Hdl };

struct NodeDecl {
    std::string label;
    int declared_delay = 0;  // pipeline latency item; verbatim for HDL nodes
    NodeKind kind = NodeKind::Equation;
    SourceLoc loc;

    // Equation form: lhs = expr
    std::string lhs;
    ExprPtr expr;

    // HDL form
    HdlCall call;
};

struct SpdProgram {
    std::string name;
    std::vector<PortDecl> inputs;
    std::vector<PortDecl> outputs;
    std::vector<ParamDecl> params;
    std::vector<NodeDecl> nodes;

    const ParamDecl* find_param(std::string_view n) const;
    const PortDecl* find_input(std::string_view n) const;
    const PortDecl* find_output(std::string_view n) const;
};

// Canonical source rendering. Expressions are printed fully parenthesized so
// that parse(print(program)) reproduces the tree exactly.
std::string pretty_print(const SpdProgram& program);
std::string pretty_print(const Expr& e);

}  // namespace spdc
