#include "spdc/parser.hpp"

#include <cstdlib>
#include <set>
#include <sstream>

namespace spdc {

namespace {

class Parser {
public:
    explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {}

    SpdProgram run() {
        SpdProgram prog;
        skip_newlines();
        while (!peek().is(TokenKind::End)) {
            parse_statement(prog);
            skip_newlines();
        }
        finish(prog);
        return prog;
    }

    ExprPtr run_expression() {
        skip_newlines();
        ExprPtr e = parse_expr();
        skip_newlines();
        if (!peek().is(TokenKind::End))
            unexpected("end of expression");
        return e;
    }

private:
    const Token& peek(size_t ahead = 0) const {
        size_t i = pos_ + ahead;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }

    const Token& take() {
        const Token& t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }

    [[noreturn]] void unexpected(std::string_view wanted) const {
        const Token& t = peek();
        std::ostringstream os;
        os << "expected " << wanted << ", got " << token_kind_name(t.kind);
        if (!t.text.empty() && t.kind != TokenKind::Newline &&
            t.kind != TokenKind::End)
            os << " '" << t.text << "'";
        fail(Errc::SyntaxError, t.loc, os.str());
    }

    const Token& expect(TokenKind k, std::string_view wanted) {
        if (!peek().is(k)) unexpected(wanted);
        return take();
    }

    void skip_newlines() {
        while (peek().is(TokenKind::Newline)) take();
    }

    void end_statement() {
        if (peek().is(TokenKind::Semi)) take();
        if (peek().is(TokenKind::End)) return;
        expect(TokenKind::Newline, "end of statement");
    }

    // --- declarations -----------------------------------------------------

    void parse_statement(SpdProgram& prog) {
        const Token& head = expect(TokenKind::Ident, "a declaration");
        if (head.text == "Name") {
            if (!prog.name.empty())
                fail(Errc::DuplicateNameDecl, head.loc,
                     "design name declared twice");
            prog.name = expect(TokenKind::Ident, "design name").text;
            end_statement();
        } else if (head.text == "Input") {
            parse_port_list(prog.inputs, PortDir::Input);
        } else if (head.text == "Output") {
            parse_port_list(prog.outputs, PortDir::Output);
        } else if (head.text == "Param") {
            parse_param(prog);
        } else {
            parse_node(prog, head);
        }
    }

    void parse_port_list(std::vector<PortDecl>& out, PortDir dir) {
        for (;;) {
            const Token& t = expect(TokenKind::Ident, "port name");
            PortDecl p;
            p.name = t.text;
            p.dir = dir;
            p.cls = classify_port(t.text);
            p.loc = t.loc;
            out.push_back(p);
            if (peek().is(TokenKind::Comma)) {
                take();
                continue;
            }
            break;
        }
        end_statement();
    }

    void parse_param(SpdProgram& prog) {
        const Token& name = expect(TokenKind::Ident, "parameter name");
        expect(TokenKind::Assign, "'='");
        bool neg = false;
        if (peek().is(TokenKind::Minus)) {
            take();
            neg = true;
        }
        const Token& num = expect(TokenKind::Number, "parameter value");
        ParamDecl p;
        p.name = name.text;
        p.literal = (neg ? "-" : "") + num.text;
        p.value = std::strtof(p.literal.c_str(), nullptr);
        p.loc = name.loc;
        for (const auto& prev : prog.params)
            if (prev.name == p.name)
                fail(Errc::MultipleAssignment, name.loc,
                     "parameter '" + p.name + "' declared twice");
        prog.params.push_back(std::move(p));
        end_statement();
    }

    void parse_node(SpdProgram& prog, const Token& label) {
        NodeDecl node;
        node.label = label.text;
        node.loc = label.loc;
        const Token& delay = expect(TokenKind::Number, "node delay");
        if (delay.text.find('.') != std::string::npos)
            fail(Errc::BadNumber, delay.loc,
                 "node delay must be a non-negative integer");
        node.declared_delay = std::atoi(delay.text.c_str());
        expect(TokenKind::Comma, "','");
        const Token& kind = expect(TokenKind::Ident, "'equ' or 'HDL'");
        expect(TokenKind::Comma, "','");
        if (kind.text == "equ") {
            node.kind = NodeKind::Equation;
            node.lhs = expect(TokenKind::Ident, "result variable").text;
            expect(TokenKind::Assign, "'='");
            node.expr = parse_expr();
        } else if (kind.text == "HDL") {
            node.kind = NodeKind::Hdl;
            node.call = parse_hdl_call();
        } else {
            fail(Errc::UnknownModuleKind, kind.loc,
                 "unknown node kind '" + kind.text + "' (expected equ or HDL)");
        }
        end_statement();
        prog.nodes.push_back(std::move(node));
    }

    // --- expressions ------------------------------------------------------

    ExprPtr parse_expr() {
        ExprPtr e = parse_term();
        while (peek().is(TokenKind::Plus) || peek().is(TokenKind::Minus)) {
            const Token& op = take();
            ExprPtr rhs = parse_term();
            e = Expr::make_bin(op.is(TokenKind::Plus) ? BinOp::Add : BinOp::Sub,
                               std::move(e), std::move(rhs), op.loc);
        }
        return e;
    }

    ExprPtr parse_term() {
        ExprPtr e = parse_factor();
        while (peek().is(TokenKind::Star) || peek().is(TokenKind::Slash)) {
            const Token& op = take();
            ExprPtr rhs = parse_factor();
            e = Expr::make_bin(op.is(TokenKind::Star) ? BinOp::Mul : BinOp::Div,
                               std::move(e), std::move(rhs), op.loc);
        }
        return e;
    }

    ExprPtr parse_factor() {
        const Token& t = peek();
        if (t.is(TokenKind::Minus)) {
            take();
            return Expr::make_neg(parse_factor(), t.loc);
        }
        if (t.is(TokenKind::LParen)) {
            take();
            ExprPtr e = parse_expr();
            expect(TokenKind::RParen, "')'");
            return e;
        }
        if (t.is(TokenKind::Ident)) {
            take();
            return Expr::make_var(t.text, t.loc);
        }
        if (t.is(TokenKind::Number)) {
            take();
            return Expr::make_literal(std::strtof(t.text.c_str(), nullptr),
                                      t.text, t.loc);
        }
        unexpected("a variable, number or '('");
    }

    // --- HDL calls --------------------------------------------------------

    HdlCall parse_hdl_call() {
        HdlCall call;
        call.loc = peek().loc;
        if (peek().is(TokenKind::LParen)) {
            take();
            for (;;) {
                call.outputs.push_back(
                    expect(TokenKind::Ident, "output variable").text);
                if (peek().is(TokenKind::Comma)) {
                    take();
                    continue;
                }
                break;
            }
            expect(TokenKind::RParen, "')'");
        } else {
            call.outputs.push_back(
                expect(TokenKind::Ident, "output variable").text);
        }
        expect(TokenKind::Assign, "'='");
        call.module = expect(TokenKind::Ident, "module name").text;
        expect(TokenKind::LParen, "'('");
        bool after_comma = false;
        for (;;) {
            if (peek().is(TokenKind::RParen)) {
                if (after_comma)
                    fail(Errc::SyntaxError, peek().loc,
                         "expected an argument or parameter group after ','");
                take();
                break;
            }
            if (peek().is(TokenKind::Less)) {
                // Parameter group written inside the argument list.
                parse_param_group(call);
                expect(TokenKind::RParen, "')'");
                break;
            }
            call.inputs.push_back(parse_hdl_arg());
            if (peek().is(TokenKind::Comma)) {
                take();
                after_comma = true;
                continue;
            }
            expect(TokenKind::RParen, "')'");
            break;
        }
        // Parameter group written after the close paren, with optional comma.
        if (peek().is(TokenKind::Comma) && peek(1).is(TokenKind::Less)) {
            take();
            parse_param_group(call);
        } else if (peek().is(TokenKind::Less)) {
            parse_param_group(call);
        }
        return call;
    }

    HdlArg parse_hdl_arg() {
        const Token& t = peek();
        if (t.is(TokenKind::Number) || t.is(TokenKind::SizedNumber))
            fail(Errc::SyntaxError, t.loc,
                 "HDL arguments must be variables; route constants through an "
                 "equation");
        HdlArg arg;
        arg.name = expect(TokenKind::Ident, "argument variable").text;
        arg.loc = t.loc;
        if (peek().is(TokenKind::LBracket)) {
            take();
            int msb = parse_bit_index();
            int lsb = msb;
            if (peek().is(TokenKind::Colon)) {
                take();
                lsb = parse_bit_index();
            }
            expect(TokenKind::RBracket, "']'");
            if (msb < lsb || msb > 31)
                fail(Errc::BadBitRange, t.loc,
                     "bit range [" + std::to_string(msb) + ":" +
                         std::to_string(lsb) + "] is out of order or exceeds "
                         "the 32-bit word");
            arg.bits = {msb, lsb};
        }
        return arg;
    }

    int parse_bit_index() {
        const Token& t = expect(TokenKind::Number, "bit index");
        if (t.text.find('.') != std::string::npos)
            fail(Errc::BadBitRange, t.loc, "bit index must be an integer");
        return std::atoi(t.text.c_str());
    }

    void parse_param_group(HdlCall& call) {
        expect(TokenKind::Less, "'<'");
        for (;;) {
            expect(TokenKind::Dot, "'.'");
            HdlParam p;
            const Token& name = expect(TokenKind::Ident, "parameter name");
            p.name = name.text;
            p.loc = name.loc;
            expect(TokenKind::LParen, "'('");
            const Token& v = peek();
            if (v.is(TokenKind::Number) || v.is(TokenKind::SizedNumber) ||
                v.is(TokenKind::Ident)) {
                p.value = take().text;
            } else if (v.is(TokenKind::Minus) && peek(1).is(TokenKind::Number)) {
                take();
                p.value = "-" + take().text;
            } else {
                unexpected("a parameter value");
            }
            expect(TokenKind::RParen, "')'");
            call.params.push_back(std::move(p));
            if (peek().is(TokenKind::Comma)) {
                take();
                continue;
            }
            break;
        }
        expect(TokenKind::Greater, "'>'");
    }

    // --- post-parse checks ------------------------------------------------

    void finish(SpdProgram& prog) {
        if (prog.name.empty())
            fail(Errc::SyntaxError, SourceLoc{1, 1},
                 "design has no Name declaration");
        check_control_ports(prog.inputs, "input");
        check_control_ports(prog.outputs, "output");
        std::set<std::string> labels;
        for (const auto& n : prog.nodes)
            if (!labels.insert(n.label).second)
                fail(Errc::DuplicateNodeLabel, n.loc,
                     "node label '" + n.label + "' used twice");
        for (auto& n : prog.nodes) {
            if (n.kind == NodeKind::Equation) {
                resolve_param_refs(*n.expr, prog.params);
            } else {
                for (const auto& a : n.call.inputs)
                    if (prog.find_param(a.name))
                        fail(Errc::SyntaxError, a.loc,
                             "parameter '" + a.name +
                                 "' cannot be wired into an HDL module; "
                                 "route it through an equation");
            }
        }
    }

    void check_control_ports(const std::vector<PortDecl>& ports,
                             std::string_view dir) {
        const PortDecl* seen[3] = {nullptr, nullptr, nullptr};
        for (const auto& p : ports) {
            int slot = -1;
            if (p.cls == PortClass::Vld) slot = 0;
            else if (p.cls == PortClass::Sop) slot = 1;
            else if (p.cls == PortClass::Eop) slot = 2;
            if (slot < 0) continue;
            if (seen[slot])
                fail(Errc::ControlPortConflict, p.loc,
                     std::string("more than one ") +
                         std::string(port_class_name(p.cls)) + " " +
                         std::string(dir) + " port ('" + seen[slot]->name +
                         "' and '" + p.name + "')");
            seen[slot] = &p;
        }
    }

    const std::vector<Token>& toks_;
    size_t pos_ = 0;
};

}  // namespace

SpdProgram parse_program(const std::vector<Token>& tokens) {
    return Parser(tokens).run();
}

SpdProgram parse_program(std::string_view source) {
    return parse_program(tokenize(source));
}

ExprPtr parse_expression(std::string_view text) {
    auto toks = tokenize(text);
    return Parser(toks).run_expression();
}

void resolve_param_refs(Expr& e, const std::vector<ParamDecl>& params) {
    switch (e.kind) {
        case ExprKind::Var:
            for (const auto& p : params)
                if (p.name == e.name) {
                    e.kind = ExprKind::ParamRef;
                    return;
                }
            return;
        case ExprKind::ParamRef:
        case ExprKind::Literal:
            return;
        case ExprKind::Unary:
            resolve_param_refs(*e.lhs, params);
            return;
        case ExprKind::Binary:
            resolve_param_refs(*e.lhs, params);
            resolve_param_refs(*e.rhs, params);
            return;
    }
}

}  // namespace spdc
