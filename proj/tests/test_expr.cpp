#include "doctest.h"

#include <cmath>
#include <cstring>
#include <random>

#include "merogeo/expr.hpp"

using namespace merogeo;
using namespace std::complex_literals;

namespace {

// Random expression text over u with literals, + - * /, integer powers and exp.
std::string random_text(std::mt19937_64 &rng, int depth)
{
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 7);
    std::uniform_real_distribution<double> lit(-2.0, 2.0);
    char buf[64];
    switch (pick(rng)) {
    case 0:
        return "u";
    case 1:
        std::snprintf(buf, sizeof buf, "(%.3f%+.3fi)", lit(rng), lit(rng));
        return buf;
    case 2:
        return "(" + random_text(rng, depth - 1) + " + " + random_text(rng, depth - 1) + ")";
    case 3:
        return "(" + random_text(rng, depth - 1) + " - " + random_text(rng, depth - 1) + ")";
    case 4:
        return random_text(rng, depth - 1) + " * " + random_text(rng, depth - 1);
    case 5:
        return "(" + random_text(rng, depth - 1) + ") / (2 + " + random_text(rng, depth - 1) + ")";
    case 6:
        return "(" + random_text(rng, depth - 1) + ")^" + std::to_string(std::uniform_int_distribution<int>(-2, 3)(rng));
    default:
        return "exp(0.3*(" + random_text(rng, depth - 1) + "))";
    }
}

cplx value(const Expr &e, cplx p)
{
    const auto v = eval(e, p);
    REQUIRE_FALSE(v.infinite);
    return v.value;
}

} // namespace

TEST_CASE("parse examples")
{
    const Expr u = variable();
    CHECK(parse("u^2+1") == power(u, 2) + constant(1.0));
    CHECK(parse("1/u") == constant(1.0) / u);
    CHECK(parse("exp(u)") == exp(u));
    CHECK(parse("2i") == constant(2.0i));
    CHECK(parse("1+2i") == constant(1.0 + 2.0i));
    CHECK(parse("-u") == negate(u));
    CHECK(parse(" u ^ (-2) ") == power(u, -2));
    CHECK(parse("u^-2") == power(u, -2));
    CHECK(parse("2*u*u") == (constant(2.0) * u) * u);
}

TEST_CASE("syntax errors carry offsets")
{
    auto offset_of = [](const char *text) -> long {
        try {
            parse(text);
        } catch (const SyntaxError &e) {
            return static_cast<long>(e.offset());
        }
        return -1;
    };
    CHECK(offset_of("u+") == 2);
    CHECK(offset_of("(u") == 2);
    CHECK(offset_of("u)") == 1);
    CHECK(offset_of("v") == 0);
    CHECK(offset_of("u^") == 2);
    CHECK(offset_of("") == 0);
    CHECK_THROWS_AS(parse("u^1.5"), ExponentNotInteger);
    CHECK_THROWS_AS(parse("u^2e3"), ExponentNotInteger);
}

TEST_CASE("eval examples")
{
    CHECK(std::abs(value(parse("u^2+1"), 1.0i)) == 0.0);
    CHECK(eval(parse("1/u"), 0.0).infinite);
    CHECK(value(parse("exp(u)"), 0.0) == cplx(1.0));
    CHECK(eval(parse("1/(u - 1)"), 1.0 + 1e-14).infinite);
    CHECK_FALSE(eval(parse("1/(u - 1)"), 1.0 + 1e-6).infinite);
    // A pole inside a subexpression propagates.
    CHECK(eval(parse("exp(1/u) + 1"), 0.0).infinite);
}

TEST_CASE("jet examples")
{
    auto j = eval_jet(parse("u^3"), 2.0);
    CHECK(j.value == cplx(8.0));
    CHECK(j.d1 == cplx(12.0));
    CHECK(j.d2 == cplx(12.0));

    j = eval_jet(parse("1/u"), 1.0);
    CHECK(j.value == cplx(1.0));
    CHECK(j.d1 == cplx(-1.0));
    CHECK(j.d2 == cplx(2.0));

    j = eval_jet(parse("exp(u)"), 0.0);
    CHECK(j.value == cplx(1.0));
    CHECK(j.d1 == cplx(1.0));
    CHECK(j.d2 == cplx(1.0));

    CHECK_THROWS_AS(eval_jet(parse("1/u"), 0.0), PoleError);
    CHECK_FALSE(try_eval_jet(parse("u^-1"), 0.0).has_value());
}

TEST_CASE("jets agree with finite differences on random expressions")
{
    std::mt19937_64 rng(20261016);
    std::uniform_real_distribution<double> coord(-1.5, 1.5);
    int checked = 0;
    while (checked < 100) {
        const auto e = parse(random_text(rng, 4));
        const cplx p(coord(rng), coord(rng));
        const double h = 1e-6 * (1.0 + std::abs(p));
        const auto j = try_eval_jet(e, p);
        const auto fp = eval(e, p + h), fm = eval(e, p - h);
        if (!j || fp.infinite || fm.infinite || std::abs(j->value) > 1e4 || std::abs(j->d1) > 1e4
            || std::abs(j->d2) > 1e4)
            continue;
        const cplx fd = (fp.value - fm.value) / (2.0 * h);
        const double scale = std::max({1.0, std::abs(j->d1), std::abs(j->value)});
        INFO("expr " << render(e) << " at " << p);
        CHECK(std::abs(j->d1 - fd) / scale <= 1e-6);

        // Second derivative from the first-derivative jets.
        const auto jp = try_eval_jet(e, p + h), jm = try_eval_jet(e, p - h);
        REQUIRE(jp);
        REQUIRE(jm);
        const cplx fd2 = (jp->d1 - jm->d1) / (2.0 * h);
        CHECK(std::abs(j->d2 - fd2) / std::max(1.0, std::abs(j->d2)) <= 1e-5);
        ++checked;
    }
}

TEST_CASE("render then parse is the identity")
{
    std::mt19937_64 rng(7);
    for (int n = 0; n < 300; ++n) {
        const auto e = parse(random_text(rng, 5));
        const auto text = render(e);
        INFO(text);
        CHECK(parse(text) == e);
        CHECK(render(parse(text)) == text);
    }
    // Literal edge cases.
    for (const char *s : {"1e-300*u", "u*(-0.5-1e20i)", "-(u+1)^-3", "exp(-u)/(u-2i)", "0.1+0.2i"}) {
        INFO(s);
        CHECK(parse(render(parse(s))) == parse(s));
    }
}

TEST_CASE("evaluation is deterministic")
{
    std::mt19937_64 rng(11);
    for (int n = 0; n < 50; ++n) {
        const auto e = parse(random_text(rng, 4));
        const cplx p(0.3, -0.7);
        const auto a = eval(e, p), b = eval(e, p);
        CHECK(a.infinite == b.infinite);
        CHECK(std::memcmp(&a.value, &b.value, sizeof(cplx)) == 0);
    }
}

TEST_CASE("several variables")
{
    const VariableNames names{"z", "y1", "y"};
    const auto e = parse("z*y1 + y^2", names);
    const std::vector<cplx> vars{2.0, 3.0, 1.0i};
    CHECK(eval(e, vars).value == cplx(5.0));
    CHECK(render(e, names) == render(parse(render(e, names), names), names));

    const auto d = differentiate(parse("u^3 + exp(2*u)"));
    CHECK(std::abs(eval(d, 0.5).value - (3.0 * 0.25 + 2.0 * std::exp(1.0))) < 1e-14);
}
