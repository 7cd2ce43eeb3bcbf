#include "spdc/ast.hpp"

#include <algorithm>
#include <sstream>

namespace spdc {

namespace {

bool has_marker(std::string_view name, std::string_view tag) {
    // `_TAG_` anywhere, or `_TAG` as a suffix.
    std::string inner = "_" + std::string(tag) + "_";
    if (name.find(inner) != std::string_view::npos) return true;
    std::string suffix = "_" + std::string(tag);
    return name.size() >= suffix.size() &&
           name.substr(name.size() - suffix.size()) == suffix;
}

}  // namespace

PortClass classify_port(std::string_view name) {
    if (has_marker(name, "VLD")) return PortClass::Vld;
    if (has_marker(name, "SOP")) return PortClass::Sop;
    if (has_marker(name, "EOP")) return PortClass::Eop;
    if (has_marker(name, "RAW")) return PortClass::Raw;
    return PortClass::Numeric;
}

std::string_view port_class_name(PortClass pc) {
    switch (pc) {
        case PortClass::Numeric: return "numeric";
        case PortClass::Raw: return "raw";
        case PortClass::Vld: return "valid";
        case PortClass::Sop: return "sop";
        case PortClass::Eop: return "eop";
    }
    return "?";
}

ExprPtr Expr::make_var(std::string n, SourceLoc loc) {
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::Var;
    e->name = std::move(n);
    e->loc = loc;
    return e;
}

ExprPtr Expr::make_param(std::string n, SourceLoc loc) {
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::ParamRef;
    e->name = std::move(n);
    e->loc = loc;
    return e;
}

ExprPtr Expr::make_literal(float v, std::string text, SourceLoc loc) {
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::Literal;
    e->value = v;
    e->literal = std::move(text);
    e->loc = loc;
    return e;
}

ExprPtr Expr::make_neg(ExprPtr inner, SourceLoc loc) {
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::Unary;
    e->lhs = std::move(inner);
    e->loc = loc;
    return e;
}

ExprPtr Expr::make_bin(BinOp op, ExprPtr l, ExprPtr r, SourceLoc loc) {
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::Binary;
    e->op = op;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    e->loc = loc;
    return e;
}

ExprPtr Expr::clone() const {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->loc = loc;
    e->name = name;
    e->value = value;
    e->literal = literal;
    e->op = op;
    if (lhs) e->lhs = lhs->clone();
    if (rhs) e->rhs = rhs->clone();
    return e;
}

namespace {

void collect_vars(const Expr& e, const std::vector<ParamDecl>& params,
                  std::vector<std::string>& out) {
    switch (e.kind) {
        case ExprKind::Var: {
            for (const auto& p : params)
                if (p.name == e.name) return;
            if (std::find(out.begin(), out.end(), e.name) == out.end())
                out.push_back(e.name);
            return;
        }
        case ExprKind::ParamRef:
        case ExprKind::Literal:
            return;
        case ExprKind::Unary:
            collect_vars(*e.lhs, params, out);
            return;
        case ExprKind::Binary:
            collect_vars(*e.lhs, params, out);
            collect_vars(*e.rhs, params, out);
            return;
    }
}

}  // namespace

std::vector<std::string> free_variables(const Expr& e,
                                        const std::vector<ParamDecl>& params) {
    std::vector<std::string> out;
    collect_vars(e, params, out);
    return out;
}

const ParamDecl* SpdProgram::find_param(std::string_view n) const {
    for (const auto& p : params)
        if (p.name == n) return &p;
    return nullptr;
}

const PortDecl* SpdProgram::find_input(std::string_view n) const {
    for (const auto& p : inputs)
        if (p.name == n) return &p;
    return nullptr;
}

const PortDecl* SpdProgram::find_output(std::string_view n) const {
    for (const auto& p : outputs)
        if (p.name == n) return &p;
    return nullptr;
}

namespace {

void print_expr(const Expr& e, std::ostream& os) {
    switch (e.kind) {
        case ExprKind::Var:
        case ExprKind::ParamRef:
            os << e.name;
            return;
        case ExprKind::Literal:
            os << (e.literal.empty() ? std::to_string(e.value) : e.literal);
            return;
        case ExprKind::Unary:
            os << "(-";
            print_expr(*e.lhs, os);
            os << ")";
            return;
        case ExprKind::Binary: {
            static const char* sym[] = {" + ", " - ", " * ", " / "};
            os << "(";
            print_expr(*e.lhs, os);
            os << sym[static_cast<int>(e.op)];
            print_expr(*e.rhs, os);
            os << ")";
            return;
        }
    }
}

void print_port_list(const std::vector<PortDecl>& ports, std::ostream& os) {
    for (size_t i = 0; i < ports.size(); ++i) {
        if (i) os << ", ";
        os << ports[i].name;
    }
}

}  // namespace

std::string pretty_print(const Expr& e) {
    std::ostringstream os;
    print_expr(e, os);
    return os.str();
}

std::string pretty_print(const SpdProgram& program) {
    std::ostringstream os;
    os << "Name " << program.name << ";\n";
    if (!program.inputs.empty()) {
        os << "Input ";
        print_port_list(program.inputs, os);
        os << ";\n";
    }
    if (!program.outputs.empty()) {
        os << "Output ";
        print_port_list(program.outputs, os);
        os << ";\n";
    }
    for (const auto& p : program.params)
        os << "Param " << p.name << " = "
           << (p.literal.empty() ? std::to_string(p.value) : p.literal) << ";\n";
    for (const auto& n : program.nodes) {
        os << n.label << " " << n.declared_delay << ", ";
        if (n.kind == NodeKind::Equation) {
            os << "equ, " << n.lhs << " = " << pretty_print(*n.expr) << ";\n";
        } else {
            os << "HDL, ";
            if (n.call.outputs.size() == 1) {
                os << n.call.outputs[0];
            } else {
                os << "(";
                for (size_t i = 0; i < n.call.outputs.size(); ++i) {
                    if (i) os << ", ";
                    os << n.call.outputs[i];
                }
                os << ")";
            }
            os << " = " << n.call.module << "(";
            for (size_t i = 0; i < n.call.inputs.size(); ++i) {
                if (i) os << ", ";
                const auto& a = n.call.inputs[i];
                os << a.name;
                if (a.bits) {
                    os << "[" << a.bits->first;
                    if (a.bits->first != a.bits->second) os << ":" << a.bits->second;
                    os << "]";
                }
            }
            os << ")";
            if (!n.call.params.empty()) {
                os << ", <";
                for (size_t i = 0; i < n.call.params.size(); ++i) {
                    if (i) os << ",";
                    os << "." << n.call.params[i].name << "("
                       << n.call.params[i].value << ")";
                }
                os << ">";
            }
            os << ";\n";
        }
    }
    return os.str();
}

}  // namespace spdc
