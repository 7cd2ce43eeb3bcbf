#pragma once

#include <map>
#include <string>
#include <vector>

#include "spdc/ast.hpp"
#include "spdc/dfg.hpp"
#include "spdc/latency_model.hpp"

namespace spdc {

enum class OpKind { Add, Sub, Mul, ConstMul, Div, Neg };

std::string_view op_kind_name(OpKind k);

struct OperatorCensus {
    int add = 0;
    int sub = 0;
    int mul = 0;
    int const_mul = 0;
    int div = 0;

    int total() const { return add + sub + mul + const_mul + div; }
    OperatorCensus& operator+=(const OperatorCensus& o);
};

// One pipelined floating-point operator inside an equation module. Operands
// reference either an earlier operator, an equation input, or a constant.
// `delay` is the internal padding (cycles) inserted ahead of that operand so
// both sides arrive together.
struct OpNode {
    struct Operand {
        int op = -1;      // index of producing OpNode, or
        int input = -1;   // index into OperatorDag::inputs, or
        float constant = 0.0f;  // when is_const
        bool is_const = false;
        int delay = 0;    // internal alignment registers

        bool is_op() const { return op >= 0; }
        bool is_input() const { return input >= 0; }
    };

    OpKind kind = OpKind::Add;
    Operand a, b;  // Neg uses a only
    int latency = 0;
    int depth = 0;  // result-ready offset from the equation's input cycle
};

// The lowered form of one equation: a DAG of binary operators evaluated at
// one vector per cycle, internally balanced so every operator's operands
// carry values from the same stream index.
struct OperatorDag {
    std::vector<std::string> inputs;  // free variables, first-use order
    std::vector<OpNode> ops;          // operands always precede consumers

    // Result: either the last relevant operator, an input copy, or a
    // constant (constant-only equations drive a fixed value every cycle).
    int root_op = -1;
    int root_input = -1;
    float root_const = 0.0f;

    int total_latency = 0;
    OperatorCensus census;
    int internal_delay_cycles = 0;  // Σ alignment registers (32-bit words)
};

/// Lower one equation body to a pipelined operator DAG using the tier's
/// operator depths. Multiplication by a parameter or literal becomes
/// CONST_MUL; division by an exactly-invertible constant (a power of two)
/// becomes CONST_MUL by the reciprocal; negation is a free sign flip folded
/// into adjacent add/sub where the result stays bit-identical. Constant
/// subtrees are folded at compile time with binary32 arithmetic.
OperatorDag lower_equation(const Expr& expr, const std::vector<ParamDecl>& params,
                           const OpLatencies& ops);

/// Evaluate the DAG for one input vector (binary32, round-to-nearest-even at
/// every operator). Matches direct recursive evaluation of the source
/// expression bit for bit.
float eval_dag(const OperatorDag& dag, const std::vector<float>& inputs);

/// Direct reference evaluation of an expression tree (same rounding).
float eval_expr(const Expr& e, const std::vector<ParamDecl>& params,
                const std::map<std::string, float>& env);

/// Lower every equation node of the graph, store each module's latency onto
/// its DfgNode, set converter latencies from the tier, and return the DAGs
/// keyed by node id.
std::map<int, OperatorDag> lower_all_equations(Dfg& dfg,
                                               const SpdProgram& program,
                                               const LatencyTier& tier);

/// Operator totals across all lowered equations.
OperatorCensus census_of(const std::map<int, OperatorDag>& dags);

}  // namespace spdc
