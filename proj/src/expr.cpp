#include "merogeo/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <type_traits>

namespace merogeo {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Expr make(ExprNode node) { return Expr(std::make_shared<const ExprNode>(std::move(node))); }

const ConstantNode *as_constant(const Expr &e) { return std::get_if<ConstantNode>(&e.node().data); }

} // namespace

Expr::Expr() : node_(std::make_shared<const ExprNode>(ExprNode{ConstantNode{0.0}})) {}

bool operator==(const Expr &a, const Expr &b)
{
    if (a.node_ == b.node_)
        return true;
    const auto &x = a.node().data;
    const auto &y = b.node().data;
    if (x.index() != y.index())
        return false;
    return std::visit(
        overloaded{
            [&](const ConstantNode &c) { return c.value == std::get<ConstantNode>(y).value; },
            [&](const VariableNode &v) { return v.index == std::get<VariableNode>(y).index; },
            [&](const BinaryNode &n) {
                const auto &m = std::get<BinaryNode>(y);
                return n.op == m.op && n.lhs == m.lhs && n.rhs == m.rhs;
            },
            [&](const PowerNode &n) {
                const auto &m = std::get<PowerNode>(y);
                return n.exponent == m.exponent && n.base == m.base;
            },
            [&](const NegateNode &n) { return n.operand == std::get<NegateNode>(y).operand; },
            [&](const ExpNode &n) { return n.operand == std::get<ExpNode>(y).operand; },
        },
        x);
}

Expr constant(cplx value) { return make({ConstantNode{value}}); }
Expr variable(int index) { return make({VariableNode{index}}); }
Expr binary(BinaryOp op, Expr lhs, Expr rhs) { return make({BinaryNode{op, std::move(lhs), std::move(rhs)}}); }
Expr power(Expr base, int exponent) { return make({PowerNode{std::move(base), exponent}}); }
Expr negate(Expr operand) { return make({NegateNode{std::move(operand)}}); }
Expr exp(Expr operand) { return make({ExpNode{std::move(operand)}}); }

Expr operator+(Expr a, Expr b) { return binary(BinaryOp::Add, std::move(a), std::move(b)); }
Expr operator-(Expr a, Expr b) { return binary(BinaryOp::Sub, std::move(a), std::move(b)); }
Expr operator*(Expr a, Expr b) { return binary(BinaryOp::Mul, std::move(a), std::move(b)); }
Expr operator/(Expr a, Expr b) { return binary(BinaryOp::Div, std::move(a), std::move(b)); }

// ---------------------------------------------------------------------------
// Parser
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' exponent)?
//   exponent:= ['+'|'-'] integer | '(' ['+'|'-'] integer ')'
//   primary := number | 'i' | name | 'exp' '(' expr ')' | '(' expr ')'
//
// Adjacent literals joined by +/- and negated literals fold into a single
// constant, so complex literals such as 1+2i parse as one constant node.
// ---------------------------------------------------------------------------

namespace {

class Parser {
public:
    Parser(std::string_view text, const VariableNames &names) : text_(text), names_(names) {}

    Expr parse_all()
    {
        auto e = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            throw SyntaxError(pos_, "operator or end of input");
        return e;
    }

private:
    std::string_view text_;
    const VariableNames &names_;
    std::size_t pos_ = 0;

    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c))
            throw SyntaxError(pos_, std::string("'") + c + "'");
    }

    static Expr fold_additive(BinaryOp op, Expr lhs, Expr rhs)
    {
        const auto *a = as_constant(lhs);
        const auto *b = as_constant(rhs);
        if (a && b)
            return constant(op == BinaryOp::Add ? a->value + b->value : a->value - b->value);
        return binary(op, std::move(lhs), std::move(rhs));
    }

    Expr parse_expr()
    {
        auto lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = fold_additive(BinaryOp::Add, std::move(lhs), parse_term());
            else if (accept('-'))
                lhs = fold_additive(BinaryOp::Sub, std::move(lhs), parse_term());
            else
                return lhs;
        }
    }

    Expr parse_term()
    {
        auto lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = binary(BinaryOp::Mul, std::move(lhs), parse_unary());
            else if (accept('/'))
                lhs = binary(BinaryOp::Div, std::move(lhs), parse_unary());
            else
                return lhs;
        }
    }

    Expr parse_unary()
    {
        if (accept('+'))
            return parse_unary();
        if (accept('-')) {
            auto operand = parse_unary();
            if (const auto *c = as_constant(operand))
                return constant(-c->value);
            return negate(std::move(operand));
        }
        return parse_power();
    }

    Expr parse_power()
    {
        auto base = parse_primary();
        if (accept('^'))
            return power(std::move(base), parse_exponent());
        return base;
    }

    int parse_exponent()
    {
        const bool paren = accept('(');
        skip_ws();
        const auto start = pos_;
        bool negative = false;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
            negative = text_[pos_] == '-';
            ++pos_;
        }
        skip_ws();
        const auto digits = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (pos_ == digits)
            throw SyntaxError(pos_, "integer exponent");
        if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E'))
            throw ExponentNotInteger(start);
        int value = 0;
        const auto res = std::from_chars(text_.data() + digits, text_.data() + pos_, value);
        if (res.ec != std::errc{})
            throw SyntaxError(digits, "exponent within int range");
        if (paren)
            expect(')');
        return negative ? -value : value;
    }

    Expr parse_number()
    {
        const auto start = pos_;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            auto look = pos_ + 1;
            if (look < text_.size() && (text_[look] == '+' || text_[look] == '-'))
                ++look;
            if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
                pos_ = look;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            }
        }
        const std::string literal(text_.substr(start, pos_ - start));
        char *end = nullptr;
        const double value = std::strtod(literal.c_str(), &end);
        if (end != literal.c_str() + literal.size() || literal == ".")
            throw SyntaxError(start, "number");
        // An imaginary suffix only counts when it does not start an identifier.
        if (pos_ < text_.size() && text_[pos_] == 'i'
            && !(pos_ + 1 < text_.size()
                 && (std::isalnum(static_cast<unsigned char>(text_[pos_ + 1])) || text_[pos_ + 1] == '_'))) {
            ++pos_;
            return constant(cplx{0.0, value});
        }
        return constant(value);
    }

    Expr parse_primary()
    {
        skip_ws();
        if (pos_ >= text_.size())
            throw SyntaxError(pos_, "operand");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return parse_number();
        if (c == '(') {
            ++pos_;
            auto inner = parse_expr();
            expect(')');
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const auto start = pos_;
            while (pos_ < text_.size()
                   && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            const auto name = text_.substr(start, pos_ - start);
            for (std::size_t i = 0; i < names_.size(); ++i)
                if (names_[i] == name)
                    return variable(static_cast<int>(i));
            if (name == "exp") {
                expect('(');
                auto arg = parse_expr();
                expect(')');
                return exp(std::move(arg));
            }
            if (name == "i")
                return constant(cplx{0.0, 1.0});
            throw SyntaxError(start, "variable name, number, exp or '('");
        }
        throw SyntaxError(pos_, "operand");
    }
};

std::string format_real(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string render_constant(cplx c)
{
    const double re = c.real();
    const double im = c.imag();
    if (im == 0.0) {
        if (std::signbit(re))
            return "(" + format_real(re) + ")";
        return format_real(re);
    }
    std::string s = "(";
    if (re != 0.0) {
        s += format_real(re);
        s += std::signbit(im) ? "-" : "+";
        s += format_real(std::fabs(im));
    } else {
        s += format_real(im);
    }
    s += "i)";
    return s;
}

int precedence(const Expr &e)
{
    return std::visit(overloaded{
                          [](const ConstantNode &) {
                              // Negative or complex literals render parenthesized.
                              return 5;
                          },
                          [](const VariableNode &) { return 5; },
                          [](const BinaryNode &n) {
                              return (n.op == BinaryOp::Add || n.op == BinaryOp::Sub) ? 1 : 2;
                          },
                          [](const PowerNode &) { return 4; },
                          [](const NegateNode &) { return 3; },
                          [](const ExpNode &) { return 5; },
                      },
                      e.node().data);
}

void render_into(const Expr &e, const VariableNames &names, std::string &out);

void render_child(const Expr &child, bool paren, const VariableNames &names, std::string &out)
{
    if (paren)
        out += '(';
    render_into(child, names, out);
    if (paren)
        out += ')';
}

void render_into(const Expr &e, const VariableNames &names, std::string &out)
{
    std::visit(overloaded{
                   [&](const ConstantNode &c) { out += render_constant(c.value); },
                   [&](const VariableNode &v) {
                       if (v.index < 0 || static_cast<std::size_t>(v.index) >= names.size())
                           throw InvalidArgument("variable index out of range for rendering");
                       out += names[static_cast<std::size_t>(v.index)];
                   },
                   [&](const BinaryNode &n) {
                       const int p = precedence(e);
                       render_child(n.lhs, precedence(n.lhs) < p, names, out);
                       switch (n.op) {
                       case BinaryOp::Add: out += '+'; break;
                       case BinaryOp::Sub: out += '-'; break;
                       case BinaryOp::Mul: out += '*'; break;
                       case BinaryOp::Div: out += '/'; break;
                       }
                       render_child(n.rhs, precedence(n.rhs) <= p, names, out);
                   },
                   [&](const PowerNode &n) {
                       render_child(n.base, precedence(n.base) <= 4, names, out);
                       out += '^';
                       if (n.exponent < 0)
                           out += "(" + std::to_string(n.exponent) + ")";
                       else
                           out += std::to_string(n.exponent);
                   },
                   [&](const NegateNode &n) {
                       out += '-';
                       render_child(n.operand, precedence(n.operand) < 3, names, out);
                   },
                   [&](const ExpNode &n) {
                       out += "exp(";
                       render_into(n.operand, names, out);
                       out += ')';
                   },
               },
               e.node().data);
}

// ---------------------------------------------------------------------------
// Evaluation. Every value carries a magnitude scale (a bound on the size of
// the terms that produced it) so cancellation to zero is recognized relative
// to the operands.
// ---------------------------------------------------------------------------

template <class T>
struct Scaled {
    T v;
    double scale;
};

inline cplx value_of(const cplx &x) { return x; }
inline cplx value_of(const Jet2 &x) { return x.value; }

template <class T>
T lift_constant(cplx c)
{
    if constexpr (std::is_same_v<T, Jet2>)
        return Jet2::constant(c);
    else
        return c;
}

template <class T>
bool finite(const T &x)
{
    auto ok = [](cplx c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); };
    if constexpr (std::is_same_v<T, Jet2>)
        return ok(x.value) && ok(x.d1) && ok(x.d2);
    else
        return ok(x);
}

template <class T>
T integer_power(T base, unsigned n)
{
    T result = lift_constant<T>(1.0);
    while (n) {
        if (n & 1u)
            result = result * base;
        n >>= 1u;
        if (n)
            base = base * base;
    }
    return result;
}

template <class T>
class Evaluator {
public:
    Evaluator(std::span<const T> vars, const EvalOptions &opts) : vars_(vars), opts_(opts) {}

    std::optional<Scaled<T>> run(const Expr &e)
    {
        auto r = eval(e);
        if (!r || !finite(r->v))
            return std::nullopt;
        return r;
    }

private:
    std::span<const T> vars_;
    const EvalOptions &opts_;

    bool is_pole(const Scaled<T> &den) const
    {
        const double mag = std::abs(value_of(den.v));
        return mag == 0.0 || mag <= opts_.pole_eps * den.scale || !std::isfinite(mag);
    }

    std::optional<Scaled<T>> eval(const Expr &e)
    {
        return std::visit(
            overloaded{
                [&](const ConstantNode &c) -> std::optional<Scaled<T>> {
                    return Scaled<T>{lift_constant<T>(c.value), std::abs(c.value)};
                },
                [&](const VariableNode &v) -> std::optional<Scaled<T>> {
                    if (v.index < 0 || static_cast<std::size_t>(v.index) >= vars_.size())
                        throw InvalidArgument("expression variable index out of range");
                    const auto &x = vars_[static_cast<std::size_t>(v.index)];
                    return Scaled<T>{x, std::abs(value_of(x))};
                },
                [&](const BinaryNode &n) -> std::optional<Scaled<T>> {
                    auto a = eval(n.lhs);
                    if (!a)
                        return std::nullopt;
                    auto b = eval(n.rhs);
                    if (!b)
                        return std::nullopt;
                    switch (n.op) {
                    case BinaryOp::Add: return Scaled<T>{a->v + b->v, a->scale + b->scale};
                    case BinaryOp::Sub: return Scaled<T>{a->v - b->v, a->scale + b->scale};
                    case BinaryOp::Mul: return Scaled<T>{a->v * b->v, a->scale * b->scale};
                    case BinaryOp::Div: {
                        if (is_pole(*b))
                            return std::nullopt;
                        auto q = a->v / b->v;
                        return Scaled<T>{q, a->scale / std::abs(value_of(b->v))};
                    }
                    }
                    return std::nullopt;
                },
                [&](const PowerNode &n) -> std::optional<Scaled<T>> {
                    auto base = eval(n.base);
                    if (!base)
                        return std::nullopt;
                    const unsigned k = static_cast<unsigned>(n.exponent < 0 ? -static_cast<long>(n.exponent)
                                                                            : n.exponent);
                    auto p = integer_power(base->v, k);
                    if (n.exponent >= 0)
                        return Scaled<T>{p, std::pow(base->scale, static_cast<double>(k))};
                    if (is_pole(*base))
                        return std::nullopt;
                    auto inv = lift_constant<T>(1.0) / p;
                    return Scaled<T>{inv, std::abs(value_of(inv))};
                },
                [&](const NegateNode &n) -> std::optional<Scaled<T>> {
                    auto a = eval(n.operand);
                    if (!a)
                        return std::nullopt;
                    return Scaled<T>{-a->v, a->scale};
                },
                [&](const ExpNode &n) -> std::optional<Scaled<T>> {
                    auto a = eval(n.operand);
                    if (!a)
                        return std::nullopt;
                    using merogeo::exp;
                    using std::exp;
                    auto r = exp(a->v);
                    if (!finite(r))
                        return std::nullopt;
                    return Scaled<T>{r, std::abs(value_of(r))};
                },
            },
            e.node().data);
    }
};

bool is_one_constant(const Expr &e)
{
    const auto *c = as_constant(e);
    return c && c->value == cplx{1.0, 0.0};
}

Expr fold_mul(Expr a, Expr b)
{
    if (is_zero_constant(a) || is_zero_constant(b))
        return constant(0.0);
    if (is_one_constant(a))
        return b;
    if (is_one_constant(b))
        return a;
    return std::move(a) * std::move(b);
}

Expr fold_add(Expr a, Expr b)
{
    if (is_zero_constant(a))
        return b;
    if (is_zero_constant(b))
        return a;
    return std::move(a) + std::move(b);
}

Expr fold_sub(Expr a, Expr b)
{
    if (is_zero_constant(b))
        return a;
    if (is_zero_constant(a))
        return negate(std::move(b));
    return std::move(a) - std::move(b);
}

} // namespace

Expr parse(std::string_view text, const VariableNames &names)
{
    return Parser(text, names).parse_all();
}

std::string render(const Expr &e, const VariableNames &names)
{
    std::string out;
    render_into(e, names, out);
    return out;
}

ExtComplex eval(const Expr &e, cplx p, const EvalOptions &opts)
{
    return eval(e, std::span<const cplx>(&p, 1), opts);
}

ExtComplex eval(const Expr &e, std::span<const cplx> vars, const EvalOptions &opts)
{
    auto r = Evaluator<cplx>(vars, opts).run(e);
    if (!r)
        return ExtComplex::pole();
    return ExtComplex::finite(r->v);
}

std::optional<Jet2> try_eval_jet(const Expr &e, cplx p, const EvalOptions &opts)
{
    return try_eval_jet(e, std::span<const cplx>(&p, 1), 0, opts);
}

std::optional<Jet2> try_eval_jet(const Expr &e, std::span<const cplx> vars, int wrt, const EvalOptions &opts)
{
    std::vector<Jet2> jets;
    jets.reserve(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i)
        jets.push_back(static_cast<int>(i) == wrt ? Jet2::variable(vars[i]) : Jet2::constant(vars[i]));
    auto r = Evaluator<Jet2>(std::span<const Jet2>(jets), opts).run(e);
    if (!r)
        return std::nullopt;
    return r->v;
}

Jet2 eval_jet(const Expr &e, cplx p, const EvalOptions &opts)
{
    auto j = try_eval_jet(e, p, opts);
    if (!j)
        throw PoleError(p);
    return *j;
}

Expr differentiate(const Expr &e, int wrt)
{
    return std::visit(
        overloaded{
            [&](const ConstantNode &) { return constant(0.0); },
            [&](const VariableNode &v) { return constant(v.index == wrt ? 1.0 : 0.0); },
            [&](const BinaryNode &n) -> Expr {
                auto da = differentiate(n.lhs, wrt);
                auto db = differentiate(n.rhs, wrt);
                switch (n.op) {
                case BinaryOp::Add: return fold_add(da, db);
                case BinaryOp::Sub: return fold_sub(da, db);
                case BinaryOp::Mul: return fold_add(fold_mul(da, n.rhs), fold_mul(n.lhs, db));
                case BinaryOp::Div: {
                    // (a'b - ab') / b^2
                    auto num = fold_sub(fold_mul(da, n.rhs), fold_mul(n.lhs, db));
                    if (is_zero_constant(num))
                        return constant(0.0);
                    return num / power(n.rhs, 2);
                }
                }
                return constant(0.0);
            },
            [&](const PowerNode &n) -> Expr {
                if (n.exponent == 0)
                    return constant(0.0);
                auto db = differentiate(n.base, wrt);
                auto lowered = n.exponent == 1 ? constant(1.0) : power(n.base, n.exponent - 1);
                return fold_mul(fold_mul(constant(static_cast<double>(n.exponent)), lowered), db);
            },
            [&](const NegateNode &n) -> Expr {
                auto d = differentiate(n.operand, wrt);
                if (is_zero_constant(d))
                    return d;
                return negate(d);
            },
            [&](const ExpNode &n) -> Expr { return fold_mul(e, differentiate(n.operand, wrt)); },
        },
        e.node().data);
}

Expr substitute_variable(const Expr &e, int from, int to)
{
    return std::visit(overloaded{
                          [&](const ConstantNode &) { return e; },
                          [&](const VariableNode &v) { return v.index == from ? variable(to) : e; },
                          [&](const BinaryNode &n) {
                              return binary(n.op, substitute_variable(n.lhs, from, to),
                                            substitute_variable(n.rhs, from, to));
                          },
                          [&](const PowerNode &n) { return power(substitute_variable(n.base, from, to), n.exponent); },
                          [&](const NegateNode &n) { return negate(substitute_variable(n.operand, from, to)); },
                          [&](const ExpNode &n) { return exp(substitute_variable(n.operand, from, to)); },
                      },
                      e.node().data);
}

bool is_zero_constant(const Expr &e)
{
    const auto *c = as_constant(e);
    return c && c->value == cplx{};
}

bool contains_variable(const Expr &e)
{
    return std::visit(overloaded{
                          [](const ConstantNode &) { return false; },
                          [](const VariableNode &) { return true; },
                          [](const BinaryNode &n) { return contains_variable(n.lhs) || contains_variable(n.rhs); },
                          [](const PowerNode &n) { return contains_variable(n.base); },
                          [](const NegateNode &n) { return contains_variable(n.operand); },
                          [](const ExpNode &n) { return contains_variable(n.operand); },
                      },
                      e.node().data);
}

bool contains_exp_of_variable(const Expr &e)
{
    return std::visit(overloaded{
                          [](const ConstantNode &) { return false; },
                          [](const VariableNode &) { return false; },
                          [](const BinaryNode &n) {
                              return contains_exp_of_variable(n.lhs) || contains_exp_of_variable(n.rhs);
                          },
                          [](const PowerNode &n) { return contains_exp_of_variable(n.base); },
                          [](const NegateNode &n) { return contains_exp_of_variable(n.operand); },
                          [](const ExpNode &n) { return contains_variable(n.operand); },
                      },
                      e.node().data);
}

} // namespace merogeo
