#include "spdc/expr_synth.hpp"

#include <cmath>

namespace spdc {

std::string_view op_kind_name(OpKind k) {
    switch (k) {
        case OpKind::Add: return "ADD";
        case OpKind::Sub: return "SUB";
        case OpKind::Mul: return "MUL";
        case OpKind::ConstMul: return "CONST_MUL";
        case OpKind::Div: return "DIV";
        case OpKind::Neg: return "NEG";
    }
    return "?";
}

OperatorCensus& OperatorCensus::operator+=(const OperatorCensus& o) {
    add += o.add;
    sub += o.sub;
    mul += o.mul;
    const_mul += o.const_mul;
    div += o.div;
    return *this;
}

namespace {

// True when multiplying by `inv` reproduces division by `p` for every
// operand, i.e. 1/p is a binary32 value (p is a power of two in range).
bool exact_reciprocal(float p, float& inv) {
    if (p == 0.0f || !std::isfinite(p)) return false;
    int exp = 0;
    if (std::frexp(std::fabs(p), &exp) != 0.5f) return false;
    inv = 1.0f / p;
    return std::isfinite(inv) && inv != 0.0f && inv * p == 1.0f;
}

// A value being assembled: an operand plus a pending free sign flip. The
// flip is folded into the consuming operator whenever the result stays
// bit-identical, so NEG almost never materializes.
struct Value {
    OpNode::Operand operand;
    bool negated = false;
    int depth = 0;
};

class Lowerer {
public:
    Lowerer(const std::vector<ParamDecl>& params, const OpLatencies& ops)
        : params_(params), ops_(ops) {}

    OperatorDag run(const Expr& expr) {
        dag_.inputs = free_variables(expr, params_);
        Value v = lower(expr);
        if (v.operand.is_const) {
            dag_.root_const = v.operand.constant;
        } else if (v.negated) {
            OpNode n;
            n.kind = OpKind::Neg;
            n.a = v.operand;
            n.latency = 0;
            n.depth = v.depth;
            dag_.root_op = push(n);
        } else if (v.operand.is_op()) {
            dag_.root_op = v.operand.op;
        } else {
            dag_.root_input = v.operand.input;
        }
        dag_.total_latency = v.depth;
        return std::move(dag_);
    }

private:
    int push(const OpNode& n) {
        dag_.ops.push_back(n);
        return static_cast<int>(dag_.ops.size()) - 1;
    }

    static OpNode::Operand const_operand(float v) {
        OpNode::Operand o;
        o.is_const = true;
        o.constant = v;
        return o;
    }

    Value make_const(float v) {
        Value r;
        r.operand = const_operand(v);
        return r;
    }

    // Materialize one pipelined operator; pads the lagging variable operand
    // so both sides carry values of the same stream index. Constant operands
    // are timeless and never padded.
    Value emit(OpKind kind, Value a, Value b, int latency) {
        int ready = std::max(a.operand.is_const ? 0 : a.depth,
                             b.operand.is_const ? 0 : b.depth);
        if (!a.operand.is_const && a.depth < ready) {
            a.operand.delay = ready - a.depth;
            dag_.internal_delay_cycles += a.operand.delay;
        }
        if (!b.operand.is_const && b.depth < ready) {
            b.operand.delay = ready - b.depth;
            dag_.internal_delay_cycles += b.operand.delay;
        }
        OpNode n;
        n.kind = kind;
        n.a = a.operand;
        n.b = b.operand;
        n.latency = latency;
        n.depth = ready + latency;
        switch (kind) {
            case OpKind::Add: ++dag_.census.add; break;
            case OpKind::Sub: ++dag_.census.sub; break;
            case OpKind::Mul: ++dag_.census.mul; break;
            case OpKind::ConstMul: ++dag_.census.const_mul; break;
            case OpKind::Div: ++dag_.census.div; break;
            case OpKind::Neg: break;
        }
        Value r;
        r.operand.op = push(n);
        r.depth = n.depth;
        return r;
    }

    Value lower(const Expr& e) {
        switch (e.kind) {
            case ExprKind::Literal:
                return make_const(e.value);
            case ExprKind::ParamRef: {
                for (const auto& p : params_)
                    if (p.name == e.name) return make_const(p.value);
                fail(Errc::UndefinedVariable, e.loc,
                     "unknown parameter '" + e.name + "'");
            }
            case ExprKind::Var: {
                Value r;
                for (size_t i = 0; i < dag_.inputs.size(); ++i)
                    if (dag_.inputs[i] == e.name)
                        r.operand.input = static_cast<int>(i);
                return r;
            }
            case ExprKind::Unary: {
                Value v = lower(*e.lhs);
                if (v.operand.is_const)
                    return make_const(-v.operand.constant);
                v.negated = !v.negated;
                return v;
            }
            case ExprKind::Binary:
                return lower_binary(e);
        }
        fail(Errc::SyntaxError, e.loc, "unreachable expression kind");
    }

    Value lower_binary(const Expr& e) {
        Value l = lower(*e.lhs);
        Value r = lower(*e.rhs);
        // Constant subtrees fold at compile time with the same binary32
        // rounding the hardware would apply.
        if (l.operand.is_const && r.operand.is_const) {
            float a = l.operand.constant, b = r.operand.constant;
            switch (e.op) {
                case BinOp::Add: return make_const(a + b);
                case BinOp::Sub: return make_const(a - b);
                case BinOp::Mul: return make_const(a * b);
                case BinOp::Div: return make_const(a / b);
            }
        }
        switch (e.op) {
            case BinOp::Add:
                if (l.negated && r.negated) {
                    l.negated = r.negated = false;
                    Value s = emit(OpKind::Add, std::move(l), std::move(r),
                                   ops_.add);
                    s.negated = true;  // -(a+b) == (-a)+(-b) bit-exact
                    return s;
                }
                if (r.negated) {
                    r.negated = false;
                    return emit(OpKind::Sub, std::move(l), std::move(r),
                                ops_.sub);
                }
                if (l.negated) {
                    l.negated = false;  // (-a)+b == b-a bit-exact
                    return emit(OpKind::Sub, std::move(r), std::move(l),
                                ops_.sub);
                }
                return emit(OpKind::Add, std::move(l), std::move(r), ops_.add);
            case BinOp::Sub:
                if (l.negated && r.negated) {
                    l.negated = r.negated = false;  // (-a)-(-b) == b-a
                    return emit(OpKind::Sub, std::move(r), std::move(l),
                                ops_.sub);
                }
                if (r.negated) {
                    r.negated = false;  // a-(-b) == a+b
                    return emit(OpKind::Add, std::move(l), std::move(r),
                                ops_.add);
                }
                if (l.negated) {
                    l.negated = false;  // (-a)-b == -(a+b)
                    Value s = emit(OpKind::Add, std::move(l), std::move(r),
                                   ops_.add);
                    s.negated = true;
                    return s;
                }
                return emit(OpKind::Sub, std::move(l), std::move(r), ops_.sub);
            case BinOp::Mul: {
                bool neg = l.negated != r.negated;
                l.negated = r.negated = false;
                Value res;
                if (r.operand.is_const)
                    res = emit(OpKind::ConstMul, std::move(l), std::move(r),
                               ops_.const_mul);
                else if (l.operand.is_const)
                    res = emit(OpKind::ConstMul, std::move(r), std::move(l),
                               ops_.const_mul);
                else
                    res = emit(OpKind::Mul, std::move(l), std::move(r),
                               ops_.mul);
                res.negated = neg;  // (-a)*b == -(a*b) bit-exact
                return res;
            }
            case BinOp::Div: {
                bool neg = l.negated != r.negated;
                l.negated = r.negated = false;
                Value res;
                float inv = 0.0f;
                if (r.operand.is_const &&
                    exact_reciprocal(r.operand.constant, inv)) {
                    r.operand.constant = inv;
                    res = emit(OpKind::ConstMul, std::move(l), std::move(r),
                               ops_.const_mul);
                } else {
                    res = emit(OpKind::Div, std::move(l), std::move(r),
                               ops_.div);
                }
                res.negated = neg;
                return res;
            }
        }
        fail(Errc::SyntaxError, e.loc, "unreachable operator");
    }

    const std::vector<ParamDecl>& params_;
    const OpLatencies& ops_;
    OperatorDag dag_;
};

}  // namespace

OperatorDag lower_equation(const Expr& expr,
                           const std::vector<ParamDecl>& params,
                           const OpLatencies& ops) {
    return Lowerer(params, ops).run(expr);
}

float eval_dag(const OperatorDag& dag, const std::vector<float>& inputs) {
    std::vector<float> value(dag.ops.size(), 0.0f);
    auto fetch = [&](const OpNode::Operand& o) -> float {
        if (o.is_const) return o.constant;
        if (o.is_op()) return value[static_cast<size_t>(o.op)];
        return inputs[static_cast<size_t>(o.input)];
    };
    for (size_t i = 0; i < dag.ops.size(); ++i) {
        const OpNode& n = dag.ops[i];
        float a = fetch(n.a);
        switch (n.kind) {
            case OpKind::Add: value[i] = a + fetch(n.b); break;
            case OpKind::Sub: value[i] = a - fetch(n.b); break;
            case OpKind::Mul: value[i] = a * fetch(n.b); break;
            case OpKind::ConstMul: value[i] = a * n.b.constant; break;
            case OpKind::Div: value[i] = a / fetch(n.b); break;
            case OpKind::Neg: value[i] = -a; break;
        }
    }
    if (dag.root_op >= 0) return value[static_cast<size_t>(dag.root_op)];
    if (dag.root_input >= 0)
        return inputs[static_cast<size_t>(dag.root_input)];
    return dag.root_const;
}

float eval_expr(const Expr& e, const std::vector<ParamDecl>& params,
                const std::map<std::string, float>& env) {
    switch (e.kind) {
        case ExprKind::Var: {
            auto it = env.find(e.name);
            if (it == env.end())
                fail(Errc::UndefinedVariable, e.loc,
                     "no value for variable '" + e.name + "'");
            return it->second;
        }
        case ExprKind::ParamRef:
            for (const auto& p : params)
                if (p.name == e.name) return p.value;
            fail(Errc::UndefinedVariable, e.loc,
                 "unknown parameter '" + e.name + "'");
        case ExprKind::Literal:
            return e.value;
        case ExprKind::Unary:
            return -eval_expr(*e.lhs, params, env);
        case ExprKind::Binary: {
            float a = eval_expr(*e.lhs, params, env);
            float b = eval_expr(*e.rhs, params, env);
            switch (e.op) {
                case BinOp::Add: return a + b;
                case BinOp::Sub: return a - b;
                case BinOp::Mul: return a * b;
                case BinOp::Div: return a / b;
            }
        }
    }
    fail(Errc::SyntaxError, e.loc, "unreachable expression kind");
}

std::map<int, OperatorDag> lower_all_equations(Dfg& dfg,
                                               const SpdProgram& program,
                                               const LatencyTier& tier) {
    std::map<int, OperatorDag> dags;
    for (auto& n : dfg.nodes) {
        if (n.kind == DfgNodeKind::EquationModule) {
            const NodeDecl& decl =
                program.nodes[static_cast<size_t>(n.decl_index)];
            OperatorDag dag = lower_equation(*decl.expr, program.params,
                                             tier.ops);
            n.latency = dag.total_latency;
            dags.emplace(n.id, std::move(dag));
        } else if (n.kind == DfgNodeKind::FormatConverter) {
            n.latency = n.conv_input_side ? tier.ops.converter_in
                                          : tier.ops.converter_out;
        }
    }
    return dags;
}

OperatorCensus census_of(const std::map<int, OperatorDag>& dags) {
    OperatorCensus c;
    for (const auto& [id, dag] : dags) c += dag.census;
    return c;
}

}  // namespace spdc
