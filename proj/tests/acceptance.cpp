// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "merogeo/coercivity.hpp"
#include "support/random_specs.hpp"

using namespace merogeo;
using namespace std::complex_literals;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string sci(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

// Random polyline from z0 with total arclength `length`.
PathSpec random_polyline(std::mt19937_64 &rng, cplx z0, double length, int legs)
{
    std::uniform_real_distribution<double> angle(0.0, 2.0 * pi), weight(0.5, 1.5);
    std::vector<double> w(static_cast<std::size_t>(legs));
    double total = 0.0;
    for (auto &x : w)
        total += x = weight(rng);
    std::vector<cplx> pts{z0};
    for (double x : w)
        pts.push_back(pts.back() + std::polar(length * x / total, angle(rng)));
    return PathSpec::polyline(pts);
}

// Polyline followed by an arc, total arclength at most `length`.
PathSpec random_mixed_path(std::mt19937_64 &rng, cplx z0, double length)
{
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double arc_len = length * (0.2 + 0.3 * u01(rng));
    auto head = random_polyline(rng, z0, length - arc_len, 2);
    const double r = 0.5 + 2.0 * u01(rng);
    const double sweep = std::min(arc_len / r, 2.0 * pi) * (u01(rng) < 0.5 ? 1.0 : -1.0);
    const double th = 2.0 * pi * u01(rng);
    const cplx center = head.end() - std::polar(r, th);
    return head.then(PathSpec({Arc{center, r, th, th + sweep}}));
}

// ---------------------------------------------------------------------------

Outcome christoffel_oracle()
{
    std::mt19937_64 rng(101);
    double worst = 0.0;
    int pattern_failures = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
        const auto m = fixtures::rational_warped(rng, n);
        std::vector<cplx> u;
        do
            u = fixtures::random_point(rng, n, 1.0);
        while (!is_metrically_ordinary(m, u));
        const auto w = christoffel_warped(m, u);
        const auto g = christoffel_generic(m, u);
        worst = std::max(worst, max_relative_deviation(w, g));
        if (!w.is_symmetric() || !g.is_symmetric() || !w.matches_warped_pattern() || !g.matches_warped_pattern())
            ++pattern_failures;
    }
    return {worst <= 1e-9 && pattern_failures == 0,
            "200 specs, max relative deviation " + sci(worst) + " (limit 1e-9), pattern/symmetry failures "
                + std::to_string(pattern_failures)};
}

Outcome flat_exactness()
{
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> len(5.0, 20.0);
    double worst = 0.0;
    int incomplete = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
        const cplx z0 = fixtures::small_complex(rng, 2.0);
        const auto path = trial % 2 ? random_mixed_path(rng, z0, len(rng)) : random_polyline(rng, z0, len(rng), 4);
        const GeodesicState s{z0, fixtures::random_point(rng, n, 1.0), fixtures::random_point(rng, n, 1.0)};
        // Arcs carry DOPRI truncation error of order tol, so integrate below the limit.
        const auto tr = trace_geodesic(MetricSpec::flat(n), s, path, 1e-12);
        if (tr.record.terminal.kind != TerminalKind::Completed)
            ++incomplete;
        for (std::size_t i = 0; i < tr.record.samples.size(); ++i) {
            const auto st = tr.state(i);
            for (std::size_t k = 0; k < n; ++k) {
                worst = std::max(worst, std::abs(st.u[k] - (s.u[k] + s.udot[k] * (st.z - z0))));
                worst = std::max(worst, std::abs(st.udot[k] - s.udot[k]));
            }
        }
    }
    return {worst <= 1e-10 && incomplete == 0, "20 paths at tol 1e-12, max |u - (u0 + udot0 (z - z0))| " + sci(worst)
                                                   + " (limit 1e-10), incomplete traces " + std::to_string(incomplete)};
}

Outcome conservation()
{
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> len(5.0, 20.0);
    double worst_residual = 0.0, worst_speed = 0.0;
    int incomplete = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
        const auto m = fixtures::gentle_warped(rng, n);
        const GeodesicState s{0.0, fixtures::random_point(rng, n, 0.3), fixtures::random_point(rng, n, 0.3)};
        const auto path = trial % 2 ? random_mixed_path(rng, 0.0, len(rng)) : random_polyline(rng, 0.0, len(rng), 3);
        const auto tr = trace_geodesic(m, s, path, 1e-10);
        if (tr.record.terminal.kind != TerminalKind::Completed)
            ++incomplete;
        worst_residual = std::max(worst_residual, tr.max_residual());
        worst_speed = std::max(worst_speed, tr.speed_drift());
    }
    return {worst_residual <= 1e-8 && worst_speed <= 1e-8 && incomplete == 0,
            "50 specs, max first-integral drift " + sci(worst_residual) + ", max speed drift " + sci(worst_speed)
                + " (limit 1e-8), incomplete traces " + std::to_string(incomplete)};
}

OdeSystem scalar(std::function<cplx(cplx, cplx)> f)
{
    return OdeSystem(1, [f](cplx z, std::span<const cplx> y, std::span<cplx> dy) {
        dy[0] = f(z, y[0]);
        return std::isfinite(std::abs(dy[0])) ? RhsStatus::Ok : RhsStatus::Pole;
    });
}

Outcome monodromy_laws()
{
    const auto loop = PathSpec::circle(0.0, 1.0);
    const auto sqrt_sys = scalar([](cplx, cplx y) { return 1.0 / (2.0 * y); });
    const auto log_sys = scalar([](cplx z, cplx) { return 1.0 / z; });

    const auto r_sqrt = monodromy_probe(sqrt_sys, {1.0}, loop, 4, 1e-10);
    const auto r_log = monodromy_probe(log_sys, {0.0}, loop, 3, 1e-10);
    double disp_err = 0.0;
    for (const auto &d : r_log.displacements)
        disp_err = std::max(disp_err, std::abs(d[0] - 2.0i * pi));

    const auto approach = PathSpec::segment(1.0, 0.0);
    const auto c_sqrt = classify_singularity(sqrt_sys, {1.0}, 0.0, approach);
    const auto c_log = classify_singularity(log_sys, {0.0}, 0.0, approach);

    const bool sqrt_ok = r_sqrt.returned && r_sqrt.loops == 2;
    const bool log_ok = !r_log.returned && !r_log.stopped && r_log.displacements.size() == 3 && disp_err <= 1e-9;
    const bool cls_ok = c_sqrt.kind == SingularityKind::BranchLike && c_sqrt.sheets == 2
                        && c_log.kind == SingularityKind::Logarithmic;
    return {sqrt_ok && log_ok && cls_ok,
            std::string("sqrt germ ") + (r_sqrt.returned ? "returns after " + std::to_string(r_sqrt.loops) : "no return")
                + ", log germ " + (r_log.returned ? "returns" : "no return") + " with displacement error "
                + sci(disp_err) + " (limit 1e-9); classes " + to_string(c_sqrt.kind) + "("
                + std::to_string(c_sqrt.sheets) + "), " + to_string(c_log.kind)};
}

Outcome quadrature_table()
{
    const auto tests = quad_self_test(100, 404);
    bool ok = tests.size() == 4;
    std::string detail;
    for (const auto &t : tests) {
        ok = ok && t.points == 100 && t.max_error <= 1e-9;
        detail += std::string(detail.empty() ? "" : ", ") + to_string(t.tag) + " " + sci(t.max_error);
    }
    return {ok, "100 points per case, max derivative error: " + detail + " (limit 1e-9)"};
}

Outcome example_class_crosscheck()
{
    EsempioSpec spec;
    spec.h = parse("u");
    spec.f = {parse("1")};
    spec.P = {{1.0, 0.0, 1.0}};
    const auto m = spec.to_metric();
    const GeodesicState s{0.0, {0.0, 0.0}, {1.0, 0.3}};
    const auto F = first_integrals(m, s);

    std::mt19937_64 rng(505);
    std::uniform_real_distribution<double> len(1.0, 5.0);
    double worst = 0.0;
    int paths = 0, failures = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const auto path = trial % 2 ? random_mixed_path(rng, 0.0, len(rng)) : random_polyline(rng, 0.0, len(rng), 3);
        const auto tr = trace_geodesic(m, s, path, 1e-11);
        if (tr.record.terminal.kind != TerminalKind::Completed) {
            ++failures;
            continue;
        }
        ++paths;
        for (const auto &smp : tr.record.samples) {
            try {
                const cplx u1 = closed_form_geodesic_u1(spec.h, spec.P, F.A, smp.z, s.z, s.u[0], s.udot[0]);
                worst = std::max(worst, std::abs(u1 - smp.y[0]));
            } catch (const Error &) {
                ++failures;
            }
        }
    }
    return {failures == 0 && worst <= 1e-7, std::to_string(paths) + " paths, max |u1 numeric - u1 closed form| "
                                                + sci(worst) + " (limit 1e-7), failures " + std::to_string(failures)};
}

Outcome completeness_dichotomy()
{
    EsempioSpec spec;
    spec.h = parse("u");
    spec.f = {parse("1")};
    spec.P = {{1.0, 0.0, 1.0}};
    const auto cert = check_esempio_coercive(spec);
    ProbeOptions opts;
    opts.rays = 32;
    opts.radius = 50.0;
    const auto coercive = incompleteness_probe(spec.to_metric(), {{0.0, {0.0, 0.0}, {1.0, 0.3}}}, opts);

    MetricSpec disc({FactorDomain::UnitDisc, FactorDomain::Plane}, constant(1.0), {constant(1.0)}, {constant(1.0)});
    const GeodesicState ds{0.0, {0.0, 0.0}, {0.6, 0.8}};
    const auto flat_disc = incompleteness_probe(disc, {ds}, opts);
    const double t_star = (1.0 - std::abs(ds.u[0])) / std::abs(ds.udot[0]);
    double worst = 0.0;
    bool all_exit = flat_disc.witnesses.size() == 32;
    for (const auto &w : flat_disc.witnesses) {
        all_exit = all_exit && w.kind == TerminalKind::DomainExit;
        worst = std::max(worst, std::abs(w.z_star - t_star * w.direction));
    }
    const bool ok = cert.verdict == Verdict::Coercive && coercive.witnesses.empty() && !coercive.budget_exceeded
                    && all_exit && worst <= 1e-8;
    return {ok, std::string("certificate ") + to_string(cert.verdict) + ", coercive fixture witnesses "
                    + std::to_string(coercive.witnesses.size()) + (coercive.budget_exceeded ? " (budget hit)" : "")
                    + "; flat-disc DomainExit witnesses " + std::to_string(flat_disc.witnesses.size())
                    + "/32, max |z* - predicted| " + sci(worst) + " (limit 1e-8)"};
}

Outcome limit_detector()
{
    const auto riccati = scalar([](cplx, cplx y) { return y * y; });
    const auto pole = radial_limit(riccati, {1.0}, PathSpec::segment(0.0, 1.0));
    const auto essential = scalar([](cplx z, cplx y) { return -y / ((z - 1.0) * (z - 1.0)); });
    const auto ess = radial_limit(essential, {1.0}, PathSpec::segment(1.0 + 1.0i, 1.0));
    const bool ok = pole.kind == LimitKind::Converged && pole.converged_to_infinity() && ess.kind == LimitKind::NoLimit;
    auto name = [](const LimitResult &r) {
        switch (r.kind) {
        case LimitKind::Converged:
            return r.converged_to_infinity() ? std::string("Converged(inf)") : std::string("Converged(finite)");
        case LimitKind::NoLimit:
            return std::string("NoLimit");
        case LimitKind::Stopped:
            break;
        }
        return std::string("Stopped");
    };
    return {ok, "y' = y^2 toward 1: " + name(pole) + "; y' = -y/(z-1)^2 vertical approach: " + name(ess)};
}

Outcome reparametrization()
{
    std::mt19937_64 rng(909);
    double worst = 0.0;
    int failures = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
        const auto m = fixtures::gentle_warped(rng, n);
        auto udot = fixtures::random_point(rng, n, 0.3);
        udot[n - 1] = fixtures::near_one(rng, 0.2);
        const GeodesicState s{0.0, fixtures::random_point(rng, n, 0.2), udot};
        TraceOptions opts;
        opts.integrate.samples_per_leg = 200;
        const auto path = PathSpec::segment(0.0, std::polar(2.0, std::uniform_real_distribution<double>(0, 2 * pi)(rng)));
        const auto tr = trace_geodesic(m, s, path, 1e-11, opts);
        if (tr.record.terminal.kind != TerminalKind::Completed) {
            ++failures;
            continue;
        }
        // Integrate the reparametrized system along the image of the path in the u_N plane.
        std::vector<cplx> vs;
        for (const auto &smp : tr.record.samples)
            vs.push_back(smp.y[n - 1]);
        IntegrateOptions iopts;
        iopts.samples_per_leg = 1;
        const auto rp = integrate_along(reparametrized_rhs(m), reparametrized_initial_state(m, s),
                                        PathSpec::polyline(vs), 1e-11, iopts);
        if (rp.terminal.kind != TerminalKind::Completed || rp.samples.size() != tr.record.samples.size()) {
            ++failures;
            continue;
        }
        for (std::size_t i = 0; i < rp.samples.size(); ++i) {
            const auto &full = tr.record.samples[i].y;
            for (std::size_t k = 0; k + 1 < n; ++k) {
                worst = std::max(worst, std::abs(rp.samples[i].y[k] - full[k]));
                // gamma_k' = udot_k / udot_N
                worst = std::max(worst, std::abs(rp.samples[i].y[n - 1 + k] - full[n + k] / full[2 * n - 1]));
            }
        }
    }
    return {failures == 0 && worst <= 1e-7, "10 fixtures, max deviation " + sci(worst) + " (limit 1e-7), failures "
                                                + std::to_string(failures)};
}

Outcome metric_compatibility()
{
    std::mt19937_64 rng(1010);
    double worst = 0.0;
    int failures = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
        const auto m = fixtures::gentle_warped(rng, n);
        const GeodesicState s{0.0, fixtures::random_point(rng, n, 0.3), fixtures::random_point(rng, n, 0.5)};
        TraceOptions opts;
        opts.integrate.samples_per_leg = 400;
        const auto path = random_polyline(rng, 0.0, 4.0, 2);
        const auto tr = trace_geodesic(m, s, path, 1e-10, opts);
        if (tr.record.terminal.kind != TerminalKind::Completed) {
            ++failures;
            continue;
        }
        // Random smooth fields c0 + c1 z + c2 exp(c3 z) per component.
        auto field = [&] {
            std::vector<std::array<cplx, 4>> c(n);
            for (auto &row : c)
                row = {fixtures::small_complex(rng, 1.0), fixtures::small_complex(rng, 0.5),
                       fixtures::small_complex(rng, 0.5), fixtures::small_complex(rng, 0.3)};
            std::vector<std::vector<cplx>> values;
            for (const auto &smp : tr.record.samples) {
                std::vector<cplx> v(n);
                for (std::size_t k = 0; k < n; ++k)
                    v[k] = c[k][0] + c[k][1] * smp.z + c[k][2] * std::exp(c[k][3] * smp.z);
                values.push_back(v);
            }
            return values;
        };
        const auto X = field(), Y = field();
        const auto DX = covariant_derivative_along(m, tr, X);
        const auto DY = covariant_derivative_along(m, tr, Y);
        std::vector<cplx> inner;
        for (std::size_t i = 0; i < X.size(); ++i)
            inner.push_back(pairing(m, tr.state(i).u, X[i], Y[i]).value);
        const auto d_inner = derivative_along(tr.record, path, inner);
        for (std::size_t i = 0; i < X.size(); ++i) {
            const auto u = tr.state(i).u;
            const cplx rhs = pairing(m, u, DX[i], Y[i]).value + pairing(m, u, X[i], DY[i]).value;
            worst = std::max(worst, std::abs(d_inner[i] - rhs));
        }
    }
    return {failures == 0 && worst <= 1e-6, "10 traces, max |d<X,Y> - <DX,Y> - <X,DY>| " + sci(worst)
                                                + " (limit 1e-6), failures " + std::to_string(failures)};
}

} // namespace

int main()
{
    struct Criterion {
        const char *name;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {"christoffel oracle equivalence", christoffel_oracle},
        {"flat-geodesic exactness", flat_exactness},
        {"conservation", conservation},
        {"monodromy laws", monodromy_laws},
        {"quadrature table", quadrature_table},
        {"example-class cross-check", example_class_crosscheck},
        {"completeness dichotomy at probe scale", completeness_dichotomy},
        {"limit detector", limit_detector},
        {"reparametrization consistency", reparametrization},
        {"metric compatibility along traces", metric_compatibility},
    };

    int failed = 0;
    int index = 0;
    for (const auto &c : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception &e) {
            out = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %2d %s: %s [%.2fs]\n", out.pass ? "PASS" : "FAIL", index, c.name, out.detail.c_str(), secs);
        std::fflush(stdout);
        failed += out.pass ? 0 : 1;
    }
    std::printf("%d/%d criteria passed\n", index - failed, index);
    return failed;
}
