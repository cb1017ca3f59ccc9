#include "merogeo/coercivity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace merogeo {

namespace {

Polynomial trimmed(std::vector<cplx> c)
{
    double scale = 0.0;
    for (auto x : c)
        scale = std::max(scale, std::abs(x));
    while (!c.empty() && std::abs(c.back()) <= 1e-14 * scale)
        c.pop_back();
    return {std::move(c)};
}

Polynomial operator+(const Polynomial &a, const Polynomial &b)
{
    std::vector<cplx> c(std::max(a.c.size(), b.c.size()), 0.0);
    for (std::size_t i = 0; i < a.c.size(); ++i)
        c[i] += a.c[i];
    for (std::size_t i = 0; i < b.c.size(); ++i)
        c[i] += b.c[i];
    return trimmed(std::move(c));
}

Polynomial operator-(const Polynomial &a)
{
    Polynomial r = a;
    for (auto &x : r.c)
        x = -x;
    return r;
}

Polynomial operator*(const Polynomial &a, const Polynomial &b)
{
    if (a.is_zero() || b.is_zero())
        return {};
    std::vector<cplx> c(a.c.size() + b.c.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c.size(); ++i)
        for (std::size_t j = 0; j < b.c.size(); ++j)
            c[i + j] += a.c[i] * b.c[j];
    return trimmed(std::move(c));
}

Polynomial derivative(const Polynomial &p)
{
    std::vector<cplx> c;
    for (std::size_t i = 1; i < p.c.size(); ++i)
        c.push_back(static_cast<double>(i) * p.c[i]);
    return trimmed(std::move(c));
}

Polynomial monomial_one() { return {{1.0}}; }

Polynomial power_of(const Polynomial &p, int k)
{
    Polynomial r = monomial_one();
    for (int i = 0; i < k; ++i)
        r = r * p;
    return r;
}

std::optional<RationalFunction> convert(const Expr &e);

struct Converter {
    std::optional<RationalFunction> operator()(const ConstantNode &c) const
    {
        return RationalFunction{trimmed({c.value}), monomial_one()};
    }
    std::optional<RationalFunction> operator()(const VariableNode &v) const
    {
        if (v.index != 0)
            return std::nullopt;
        return RationalFunction{{{0.0, 1.0}}, monomial_one()};
    }
    std::optional<RationalFunction> operator()(const BinaryNode &b) const
    {
        auto l = convert(b.lhs);
        auto r = convert(b.rhs);
        if (!l || !r)
            return std::nullopt;
        switch (b.op) {
        case BinaryOp::Add:
            return RationalFunction{l->num * r->den + r->num * l->den, l->den * r->den};
        case BinaryOp::Sub:
            return RationalFunction{l->num * r->den + -(r->num * l->den), l->den * r->den};
        case BinaryOp::Mul:
            return RationalFunction{l->num * r->num, l->den * r->den};
        case BinaryOp::Div:
            if (r->num.is_zero())
                return std::nullopt;
            return RationalFunction{l->num * r->den, l->den * r->num};
        }
        return std::nullopt;
    }
    std::optional<RationalFunction> operator()(const PowerNode &p) const
    {
        auto b = convert(p.base);
        if (!b)
            return std::nullopt;
        if (p.exponent >= 0)
            return RationalFunction{power_of(b->num, p.exponent), power_of(b->den, p.exponent)};
        if (b->num.is_zero())
            return std::nullopt;
        return RationalFunction{power_of(b->den, -p.exponent), power_of(b->num, -p.exponent)};
    }
    std::optional<RationalFunction> operator()(const NegateNode &n) const
    {
        auto o = convert(n.operand);
        if (!o)
            return std::nullopt;
        return RationalFunction{-o->num, o->den};
    }
    std::optional<RationalFunction> operator()(const ExpNode &x) const
    {
        auto o = convert(x.operand);
        if (!o || o->num.degree() > 0 || o->den.degree() != 0)
            return std::nullopt;
        const cplx arg = o->num.is_zero() ? cplx(0.0) : o->num.c[0] / o->den.c[0];
        return RationalFunction{trimmed({std::exp(arg)}), monomial_one()};
    }
};

std::optional<RationalFunction> convert(const Expr &e)
{
    return std::visit(Converter{}, e.node().data);
}

Expr polynomial_in(const std::vector<cplx> &coeffs, const Expr &x)
{
    Expr acc = constant(0.0);
    bool first = true;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i] == cplx(0.0))
            continue;
        Expr term = i == 0 ? constant(coeffs[i])
                           : (coeffs[i] == cplx(1.0) ? (i == 1 ? x : power(x, static_cast<int>(i)))
                                                     : constant(coeffs[i]) * (i == 1 ? x : power(x, static_cast<int>(i))));
        acc = first ? term : acc + term;
        first = false;
    }
    return acc;
}

std::string factor_name(const char *what, std::size_t k)
{
    return std::string(what) + "_" + std::to_string(k);
}

} // namespace

MetricSpec EsempioSpec::to_metric() const
{
    const auto n = dimension();
    if (n < 2 || P.size() != f.size())
        throw InvalidArgument("need one polynomial and one fiber function per factor beyond the first");
    if (!domains.empty() && domains.size() != n)
        throw InvalidArgument("domain list does not match the dimension");
    const Expr dh = differentiate(h);
    std::vector<Expr> a, fe;
    for (std::size_t k = 0; k < f.size(); ++k) {
        a.push_back(constant(1.0) / polynomial_in(P[k], h));
        fe.push_back(power(f[k], 2));
    }
    auto doms = domains.empty() ? std::vector<FactorDomain>(n, FactorDomain::Plane) : domains;
    return MetricSpec(doms, power(dh, 2), a, fe);
}

std::optional<RationalFunction> to_rational(const Expr &e)
{
    auto r = convert(e);
    if (r && r->den.is_zero())
        return std::nullopt;
    return r;
}

bool is_nonconstant(const RationalFunction &r)
{
    const auto w = derivative(r.num) * r.den + -(r.num * derivative(r.den));
    return !w.is_zero();
}

const char *to_string(Verdict v)
{
    return v == Verdict::Coercive ? "Coercive" : "NotCertified";
}

Certificate check_esempio_coercive(const EsempioSpec &s)
{
    Certificate cert;
    auto add = [&](std::string name, bool ok, std::string detail) {
        cert.conditions.push_back({std::move(name), ok, std::move(detail)});
        return ok;
    };
    const auto n = s.dimension();

    bool ok = add("shape", n >= 2 && s.P.size() == s.f.size() && (s.domains.empty() || s.domains.size() == n),
                  "N = " + std::to_string(n) + " with one polynomial and one fiber function per factor beyond the first");
    if (!ok) {
        cert.verdict = Verdict::NotCertified;
        return cert;
    }

    for (std::size_t k = 0; k < s.P.size(); ++k) {
        const auto p = trimmed(s.P[k]);
        const auto name = factor_name("P", k + 2);
        ok &= add(name + " degree", p.degree() <= 2,
                  name + " has degree " + std::to_string(std::max(p.degree(), 0)) + " (at most 2 allowed)");
        ok &= add(name + " nonzero", !p.is_zero(), name + " is not the zero polynomial");
    }

    const auto hr = to_rational(s.h);
    ok &= add("h rational", hr.has_value(), "h is a rational function of u");
    ok &= add("h nonconstant", hr && is_nonconstant(*hr),
              "h is nonconstant, so as a map of the sphere it takes every value");

    for (std::size_t k = 0; k < s.f.size(); ++k) {
        const auto fr = to_rational(s.f[k]);
        const auto name = factor_name("f", k + 2);
        ok &= add(name + " rational", fr.has_value(), name + " is a rational function of its coordinate");
        ok &= add(name + " not identically zero", fr && !fr->num.is_zero(),
                  name + " is nonconstant or a nonzero constant");
    }

    const bool planar =
        std::all_of(s.domains.begin(), s.domains.end(), [](FactorDomain d) { return d == FactorDomain::Plane; });
    ok &= add("plane factors", planar, "every factor is the complex plane");
    if (!planar)
        cert.notes.push_back("disc factors fall outside the certified class; use the numeric probe instead");

    if (ok) {
        // Some ordinary point must exist; any one suffices and is not reported.
        const auto m = s.to_metric();
        bool found = false;
        for (int i = 0; i < 64 && !found; ++i) {
            const double r = 0.37 + 0.11 * i;
            const double th = 2.399963 * i;
            std::vector<cplx> u(n, std::polar(r, th));
            for (std::size_t k = 1; k < n; ++k)
                u[k] = std::polar(r * (1.0 + 0.1 * static_cast<double>(k)), th + static_cast<double>(k));
            found = is_metrically_ordinary(m, u);
        }
        ok &= add("ordinary point", found, "the metric is holomorphic and nondegenerate somewhere");
    }

    if (ok) {
        cert.notes.push_back("with Q = A_1 - sum_l A_l P_l, each germ of u1 satisfies Phi(h(u1)) = z - z0 where Phi is "
                             "an antiderivative of 1/sqrt(Q) from the log, degenerate log, square root or linear case");
        cert.notes.push_back("the two square roots of Q differ by a sign, so their surfaces are isomorphic and one "
                             "branch is checked");
        cert.notes.push_back("the fiber coordinates integrate f_k du_k = sqrt(A_k) P_k(h(u1)) dz along the same germ");
    }
    cert.verdict = ok ? Verdict::Coercive : Verdict::NotCertified;
    return cert;
}

// ---------------------------------------------------------------------------

const char *to_string(RayStatus s)
{
    switch (s) {
    case RayStatus::Completed:
        return "completed";
    case RayStatus::SoftStop:
        return "soft_stop";
    case RayStatus::Witness:
        return "witness";
    case RayStatus::Budget:
        return "budget";
    }
    return "?";
}

namespace {

bool soft(const SingularityClass &c)
{
    return c.kind == SingularityKind::BranchLike || c.kind == SingularityKind::Logarithmic;
}

} // namespace

ProbeResult incompleteness_probe(const MetricSpec &m, const std::vector<GeodesicState> &seeds, const ProbeOptions &opts)
{
    if (opts.rays < 1 || !(opts.radius > 0.0))
        throw InvalidArgument("probe needs at least one ray and a positive radius");
    for (const auto &s : seeds)
        if (!is_metrically_ordinary(m, s.u, opts.thresholds))
            throw NotOrdinary("probe seed is not metrically ordinary");

    ProbeResult res;
    auto remaining = [&] { return opts.budget > res.steps ? opts.budget - res.steps : 0; };

    for (std::size_t si = 0; si < seeds.size() && !res.budget_exceeded; ++si) {
        for (int j = 0; j < opts.rays && !res.budget_exceeded; ++j) {
            RayOutcome out;
            out.seed = si;
            out.ray = j;
            out.angle = 2.0 * std::numbers::pi * j / opts.rays;
            const cplx dir = std::polar(1.0, out.angle);
            const cplx z0 = seeds[si].z;
            const cplx end = z0 + opts.radius * dir;

            GeodesicState state = seeds[si];
            PathSpec path = PathSpec::segment(z0, end);
            int restarts = 0;

            auto witness = [&](const Terminal &t) {
                out.status = RayStatus::Witness;
                res.witnesses.push_back({si, j, out.angle, dir, t.z, t.kind, t.singularity});
            };

            while (true) {
                TraceOptions topts;
                topts.thresholds = opts.thresholds;
                topts.classify_options = opts.classify;
                topts.classify_options.tol = opts.tol;
                topts.integrate.max_steps = remaining();
                const auto tr = trace_geodesic(m, state, path, opts.tol, topts);
                const auto used = tr.record.stats.accepted + tr.record.stats.rejected;
                res.steps += used;
                out.steps += used;
                const auto &term = tr.record.terminal;
                if (term.kind == TerminalKind::Completed) {
                    out.status = RayStatus::Completed;
                    break;
                }
                out.stops.push_back({term.z, term.kind, term.cause, term.singularity, false});
                if (term.kind == TerminalKind::DomainExit) {
                    witness(term);
                    break;
                }
                if (term.cause == StopCause::StepBudget) {
                    out.status = RayStatus::Budget;
                    res.budget_exceeded = true;
                    break;
                }
                if (soft(term.singularity)) {
                    out.status = RayStatus::SoftStop;
                    break;
                }
                if (restarts >= opts.max_restarts) {
                    witness(term);
                    break;
                }

                // Detour on a semicircle about the stop and rejoin the ray.
                const cplx zs = term.z;
                const double rho = std::min({opts.detour_radius, 0.5 * std::abs(zs - z0), 0.5 * std::abs(end - zs)});
                const auto &samples = tr.record.samples;
                std::size_t pick = samples.size();
                for (std::size_t i = 0; i < samples.size(); ++i)
                    if (std::abs(samples[i].z - zs) >= rho)
                        pick = i;
                if (!(rho > 1e-9) || pick == samples.size()) {
                    witness(term);
                    break;
                }
                const cplx before = zs - rho * dir;
                const cplx after = zs + rho * dir;
                bool resumed = false;
                for (double side : {1.0, -1.0}) {
                    std::vector<Leg> legs;
                    if (std::abs(samples[pick].z - before) > 1e-12 * (1.0 + std::abs(before)))
                        legs.push_back(Segment{samples[pick].z, before});
                    const double back = out.angle + std::numbers::pi;
                    legs.push_back(Arc{zs, rho, back, back - side * std::numbers::pi});
                    TraceOptions dopts = topts;
                    dopts.classify = false;
                    dopts.integrate.max_steps = remaining();
                    const auto detour_path = PathSpec(legs);
                    auto d = trace_geodesic(m, unpack(samples[pick].z, samples[pick].y), detour_path, opts.tol, dopts);
                    const auto dused = d.record.stats.accepted + d.record.stats.rejected;
                    res.steps += dused;
                    out.steps += dused;
                    if (d.record.terminal.kind == TerminalKind::Completed) {
                        state = unpack(after, d.record.final_state());
                        state.z = after;
                        resumed = true;
                        break;
                    }
                    if (d.record.terminal.cause == StopCause::StepBudget) {
                        res.budget_exceeded = true;
                        break;
                    }
                }
                if (res.budget_exceeded) {
                    out.status = RayStatus::Budget;
                    break;
                }
                if (!resumed) {
                    witness(term);
                    break;
                }
                out.stops.back().restarted = true;
                ++restarts;
                if (std::abs(end - after) <= 1e-12 * (1.0 + std::abs(end))) {
                    out.status = RayStatus::Completed;
                    break;
                }
                path = PathSpec::segment(after, end);
            }
            res.rays.push_back(out);
        }
    }
    return res;
}

} // namespace merogeo
