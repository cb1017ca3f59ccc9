#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "merogeo/error.hpp"
#include "merogeo/jet.hpp"

namespace merogeo {

// A point of the Riemann sphere; also the result of evaluating an expression,
// where `infinite` is the pole marker.
struct ExtComplex {
    cplx value{};
    bool infinite = false;

    static ExtComplex finite(cplx v) { return {v, false}; }
    static ExtComplex pole() { return {cplx{}, true}; }

    friend bool operator==(const ExtComplex &, const ExtComplex &) = default;
};

struct ExprNode;

// Immutable handle to a parsed expression tree. Copies share the tree.
class Expr {
public:
    Expr();
    explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

    const ExprNode &node() const { return *node_; }

    friend bool operator==(const Expr &a, const Expr &b);

private:
    std::shared_ptr<const ExprNode> node_;
};

enum class BinaryOp { Add, Sub, Mul, Div };

struct ConstantNode {
    cplx value;
};
struct VariableNode {
    int index;
};
struct BinaryNode {
    BinaryOp op;
    Expr lhs;
    Expr rhs;
};
struct PowerNode {
    Expr base;
    int exponent;
};
struct NegateNode {
    Expr operand;
};
struct ExpNode {
    Expr operand;
};

struct ExprNode {
    std::variant<ConstantNode, VariableNode, BinaryNode, PowerNode, NegateNode, ExpNode> data;
};

// Builders. These do no simplification beyond what the caller writes.
Expr constant(cplx value);
Expr variable(int index = 0);
Expr binary(BinaryOp op, Expr lhs, Expr rhs);
Expr power(Expr base, int exponent);
Expr negate(Expr operand);
Expr exp(Expr operand);

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);

struct EvalOptions {
    // A denominator is a pole when |value| <= pole_eps * (magnitude scale of its operands).
    double pole_eps = 1e-12;
};

// Variable names for one parsing context; index i of a VariableNode refers to names[i].
using VariableNames = std::vector<std::string>;

inline const VariableNames &default_variables()
{
    static const VariableNames names{"u"};
    return names;
}

Expr parse(std::string_view text, const VariableNames &names = default_variables());
std::string render(const Expr &e, const VariableNames &names = default_variables());

ExtComplex eval(const Expr &e, cplx p, const EvalOptions &opts = {});
ExtComplex eval(const Expr &e, std::span<const cplx> vars, const EvalOptions &opts = {});

// Value and first two derivatives; nullopt on a pole.
std::optional<Jet2> try_eval_jet(const Expr &e, cplx p, const EvalOptions &opts = {});
std::optional<Jet2> try_eval_jet(const Expr &e, std::span<const cplx> vars, int wrt, const EvalOptions &opts = {});

// Throws PoleError.
Jet2 eval_jet(const Expr &e, cplx p, const EvalOptions &opts = {});

// Symbolic derivative with respect to variable `wrt`, folding trivial 0/1 factors.
Expr differentiate(const Expr &e, int wrt = 0);

// Replaces variable `from` by variable `to`.
Expr substitute_variable(const Expr &e, int from, int to);

bool is_zero_constant(const Expr &e);
bool contains_variable(const Expr &e);
bool contains_exp_of_variable(const Expr &e);

} // namespace merogeo
