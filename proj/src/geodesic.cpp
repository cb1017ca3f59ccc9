#include "merogeo/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace merogeo {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

// The ODE only needs the logarithmic derivatives b1'/b1, a'/a, f'/f, so a small
// coefficient is harmless; only a vanishing one is a singularity of the system.
bool usable(const Jet2 &j)
{
    return std::isfinite(std::abs(j.value)) && std::isfinite(std::abs(j.d1)) && std::abs(j.value) > 1e-300;
}

// Metric data and first derivatives at a point; a[k-2], f[k-2].
struct Coefficients {
    Jet2 b1;
    std::vector<Jet2> a;
    std::vector<Jet2> f;
};

bool evaluate(const MetricSpec &m, std::span<const cplx> u, const MetricThresholds &th, Coefficients &out)
{
    const auto n = m.dimension();
    auto b1 = try_eval_jet(m.b1(), u[0], th.eval);
    if (!b1 || !usable(*b1))
        return false;
    out.b1 = *b1;
    out.a.resize(n - 1);
    out.f.resize(n - 1);
    for (std::size_t k = 2; k <= n; ++k) {
        auto a = try_eval_jet(m.a(k), u[0], th.eval);
        auto f = try_eval_jet(m.f(k), u[k - 1], th.eval);
        if (!a || !f || !usable(*a) || !usable(*f))
            return false;
        out.a[k - 2] = *a;
        out.f[k - 2] = *f;
    }
    return true;
}

cplx value_at(const Expr &e, cplx p, const MetricThresholds &th)
{
    const auto v = eval(e, p, th.eval);
    if (v.infinite)
        throw PoleError(p);
    return v.value;
}

// b1 udot1^2 + sum a_k f_k udot_k^2 without domain checks; NaN on a pole.
cplx raw_speed(const MetricSpec &m, const GeodesicState &s, const MetricThresholds &th)
{
    const auto b1 = eval(m.b1(), s.u[0], th.eval);
    if (b1.infinite)
        return {nan_value, nan_value};
    cplx sum = b1.value * s.udot[0] * s.udot[0];
    for (std::size_t k = 2; k <= m.dimension(); ++k) {
        const auto a = eval(m.a(k), s.u[0], th.eval);
        const auto f = eval(m.f(k), s.u[k - 1], th.eval);
        if (a.infinite || f.infinite)
            return {nan_value, nan_value};
        sum += a.value * f.value * s.udot[k - 1] * s.udot[k - 1];
    }
    return sum;
}

void check_state(const MetricSpec &m, const GeodesicState &s)
{
    if (s.u.size() != m.dimension() || s.udot.size() != m.dimension())
        throw InvalidArgument("geodesic state dimension does not match the metric");
}

} // namespace

State pack(const GeodesicState &s)
{
    State y(s.u);
    y.insert(y.end(), s.udot.begin(), s.udot.end());
    return y;
}

GeodesicState unpack(cplx z, std::span<const cplx> y)
{
    const auto n = y.size() / 2;
    GeodesicState s;
    s.z = z;
    s.u.assign(y.begin(), y.begin() + static_cast<long>(n));
    s.udot.assign(y.begin() + static_cast<long>(n), y.end());
    return s;
}

const char *to_string(IntegralCase c)
{
    return c == IntegralCase::General ? "general" : "constant_u1";
}

OdeSystem geodesic_rhs(const MetricSpec &m, const MetricThresholds &th)
{
    const auto n = m.dimension();
    return OdeSystem(2 * n, [m, th, n](cplx, std::span<const cplx> y, std::span<cplx> dy) {
        Coefficients c;
        if (!evaluate(m, y.subspan(0, n), th, c))
            return RhsStatus::Pole;
        const auto v = y.subspan(n, n);
        for (std::size_t i = 0; i < n; ++i)
            dy[i] = v[i];
        cplx acc1 = -c.b1.d1 / (2.0 * c.b1.value) * v[0] * v[0];
        for (std::size_t k = 2; k <= n; ++k) {
            const auto &a = c.a[k - 2];
            const auto &f = c.f[k - 2];
            const auto vk = v[k - 1];
            acc1 += a.d1 * f.value / (2.0 * c.b1.value) * vk * vk;
            dy[n + k - 1] = -f.d1 / (2.0 * f.value) * vk * vk - a.d1 / a.value * v[0] * vk;
        }
        dy[n] = acc1;
        return RhsStatus::Ok;
    });
}

FirstIntegrals first_integrals(const MetricSpec &m, const GeodesicState &s0, const MetricThresholds &th)
{
    check_state(m, s0);
    const auto check = check_metrically_ordinary(m, s0.u, th);
    if (!check.ordinary)
        throw NotOrdinary("initial point is not metrically ordinary");

    const auto n = m.dimension();
    FirstIntegrals F;
    F.A.resize(n);
    if (std::abs(s0.udot[0]) < th.degen_eps) {
        F.kind = IntegralCase::ConstantU1;
        F.A[0] = s0.u[0];
        for (std::size_t k = 2; k <= n; ++k)
            F.A[k - 1] = s0.udot[k - 1] * s0.udot[k - 1] * value_at(m.f(k), s0.u[k - 1], th);
        return F;
    }
    F.kind = IntegralCase::General;
    cplx a1 = s0.udot[0] * s0.udot[0] * value_at(m.b1(), s0.u[0], th);
    for (std::size_t k = 2; k <= n; ++k) {
        const auto a = value_at(m.a(k), s0.u[0], th);
        const auto f = value_at(m.f(k), s0.u[k - 1], th);
        F.A[k - 1] = s0.udot[k - 1] * s0.udot[k - 1] * f * a * a;
        a1 += F.A[k - 1] / a;
    }
    F.A[0] = a1;
    return F;
}

std::vector<double> first_integral_residual(const MetricSpec &m, const GeodesicState &s, const FirstIntegrals &F,
                                            const MetricThresholds &th)
{
    check_state(m, s);
    const auto n = m.dimension();
    if (F.A.size() != n)
        throw InvalidArgument("first integrals do not match the metric dimension");
    std::vector<double> r(n);
    if (F.kind == IntegralCase::ConstantU1) {
        r[0] = std::abs(s.u[0] - F.A[0]);
        for (std::size_t k = 2; k <= n; ++k)
            r[k - 1] = std::abs(s.udot[k - 1] * s.udot[k - 1] * value_at(m.f(k), s.u[k - 1], th) - F.A[k - 1]);
        return r;
    }
    cplx rhs1 = F.A[0];
    for (std::size_t k = 2; k <= n; ++k) {
        const auto a = value_at(m.a(k), s.u[0], th);
        const auto f = value_at(m.f(k), s.u[k - 1], th);
        r[k - 1] = std::abs(s.udot[k - 1] * s.udot[k - 1] * f * a * a - F.A[k - 1]);
        rhs1 -= F.A[k - 1] / a;
    }
    r[0] = std::abs(s.udot[0] * s.udot[0] * value_at(m.b1(), s.u[0], th) - rhs1);
    return r;
}

double GeodesicTrace::max_residual() const
{
    double r = 0.0;
    for (const auto &row : residuals)
        for (double x : row)
            r = std::max(r, std::isnan(x) ? std::numeric_limits<double>::infinity() : x);
    return r;
}

double GeodesicTrace::speed_drift() const
{
    double d = 0.0;
    for (const auto &s : speeds) {
        const double x = std::abs(s - speeds.front());
        d = std::max(d, std::isnan(x) ? std::numeric_limits<double>::infinity() : x);
    }
    return d;
}

GeodesicTrace trace_geodesic(const MetricSpec &m, const GeodesicState &s0, const PathSpec &path, double tol,
                             const TraceOptions &opts)
{
    check_state(m, s0);
    m.check_domain(s0.u);
    if (std::abs(path.start() - s0.z) > 1e-12 * (1.0 + std::abs(s0.z)))
        throw InvalidArgument("path does not start at the seed point");

    const auto n = m.dimension();
    GeodesicTrace out(path);
    out.dimension = n;
    out.integrals = first_integrals(m, s0, opts.thresholds);

    auto integ = opts.integrate;
    std::vector<std::size_t> discs;
    for (std::size_t i = 0; i < n; ++i)
        if (m.domains()[i] == FactorDomain::UnitDisc)
            discs.push_back(i);
    if (!discs.empty() && !integ.boundary) {
        integ.boundary = [discs](std::span<const cplx> y) {
            double g = -std::numeric_limits<double>::infinity();
            for (auto i : discs)
                g = std::max(g, std::abs(y[i]) - 1.0);
            return g;
        };
    }

    const auto sys = geodesic_rhs(m, opts.thresholds);
    out.record = integrate_along(sys, pack(s0), path, tol, integ);

    for (const auto &sample : out.record.samples) {
        const auto s = unpack(sample.z, sample.y);
        try {
            out.residuals.push_back(first_integral_residual(m, s, out.integrals, opts.thresholds));
        } catch (const PoleError &) {
            out.residuals.emplace_back(n, nan_value);
        }
        out.speeds.push_back(raw_speed(m, s, opts.thresholds));
    }

    auto &term = out.record.terminal;
    if (opts.classify && term.kind == TerminalKind::SingularStop && term.cause != StopCause::StepBudget
        && term.t > 0.0) {
        const double length = path.arclength();
        const double travelled = term.t * length;
        const double backoff =
            opts.classify_backoff > 0.0 ? std::min(opts.classify_backoff, travelled) : std::min(0.5, 0.5 * travelled);
        const double t_start = term.t - backoff / length;
        const auto &samples = out.record.samples;
        std::size_t pick = 0;
        for (std::size_t i = 0; i < samples.size(); ++i)
            if (samples[i].t <= t_start)
                pick = i;
        if (samples[pick].t < term.t) {
            const auto approach = path.subpath(samples[pick].t, term.t);
            const auto center = approach.end();
            if (std::abs(approach.start() - center) > 0.0) {
                auto cls = classify_singularity(sys, samples[pick].y, center, approach, opts.classify_options);
                if (cls.kind == SingularityKind::Undetermined && !term.singularity.note.empty())
                    cls.note = term.singularity.note + "; " + cls.note;
                term.singularity = cls;
            }
        }
    }
    return out;
}

OdeSystem reparametrized_rhs(const MetricSpec &m, const MetricThresholds &th)
{
    const auto n = m.dimension();
    const auto d = n - 1;
    return OdeSystem(2 * d, [m, th, n, d](cplx v, std::span<const cplx> y, std::span<cplx> dy) {
        std::vector<cplx> u(y.begin(), y.begin() + static_cast<long>(d));
        u.push_back(v);
        std::vector<cplx> xi(y.begin() + static_cast<long>(d), y.end());
        xi.push_back(1.0);
        std::vector<cplx> S(n, 0.0);
        try {
            const auto gamma = christoffel_warped(m, u, th);
            for (const auto &[key, value] : gamma.entries()) {
                const auto [i, j, k] = key;
                S[static_cast<std::size_t>(k - 1)] += value * xi[static_cast<std::size_t>(i - 1)]
                                                      * xi[static_cast<std::size_t>(j - 1)];
            }
        } catch (const Error &) {
            return RhsStatus::Pole;
        }
        for (std::size_t k = 0; k < d; ++k) {
            dy[k] = xi[k];
            dy[d + k] = xi[k] * S[n - 1] - S[k];
        }
        return RhsStatus::Ok;
    });
}

State reparametrized_initial_state(const MetricSpec &m, const GeodesicState &s0, const MetricThresholds &th)
{
    check_state(m, s0);
    const auto n = m.dimension();
    const auto un = s0.udot[n - 1];
    if (std::abs(un) < th.degen_eps)
        throw VanishingUN();
    State y(s0.u.begin(), s0.u.end() - 1);
    for (std::size_t k = 0; k + 1 < n; ++k)
        y.push_back(s0.udot[k] / un);
    return y;
}

namespace {

// Sample index lists per leg: the shared break point followed by the leg's samples.
std::vector<std::vector<std::size_t>> leg_groups(const TraceRecord &record, std::size_t legs)
{
    std::vector<std::vector<std::size_t>> groups(legs);
    const auto &s = record.samples;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto leg = i == 0 ? 0 : s[i].leg;
        if (groups.at(leg).empty() && leg > 0 && i > 0)
            groups[leg].push_back(i - 1);
        groups[leg].push_back(i);
    }
    return groups;
}

template <class Get>
cplx stencil(const std::vector<std::size_t> &idx, std::size_t p, double h, Get get)
{
    const auto n = idx.size();
    auto f = [&](std::size_t q) { return get(idx[q]); };
    if (p >= 2 && p + 2 < n)
        return (-f(p + 2) + 8.0 * f(p + 1) - 8.0 * f(p - 1) + f(p - 2)) / (12.0 * h);
    if (p == 0)
        return (-11.0 * f(0) + 18.0 * f(1) - 9.0 * f(2) + 2.0 * f(3)) / (6.0 * h);
    if (p == 1)
        return (-2.0 * f(0) - 3.0 * f(1) + 6.0 * f(2) - f(3)) / (6.0 * h);
    if (p == n - 1)
        return (11.0 * f(n - 1) - 18.0 * f(n - 2) + 9.0 * f(n - 3) - 2.0 * f(n - 4)) / (6.0 * h);
    return (2.0 * f(n - 1) + 3.0 * f(n - 2) - 6.0 * f(n - 3) + f(n - 4)) / (6.0 * h);
}

// Calls fn(sample, group, position, dt, dz/dt) for each sample once.
template <class Fn>
void for_each_grid_point(const TraceRecord &record, const PathSpec &path, Fn fn)
{
    const auto groups = leg_groups(record, path.legs().size());
    std::vector<bool> done(record.samples.size(), false);
    for (std::size_t leg = 0; leg < groups.size(); ++leg) {
        const auto &g = groups[leg];
        if (g.empty())
            continue;
        if (g.size() < 5)
            throw InvalidArgument("covariant derivative needs at least 4 grid intervals per leg");
        const double dt = (record.samples[g.back()].t - record.samples[g.front()].t) / static_cast<double>(g.size() - 1);
        for (std::size_t p = 1; p < g.size(); ++p) {
            const double step = record.samples[g[p]].t - record.samples[g[p - 1]].t;
            if (std::abs(step - dt) > 1e-9 * dt)
                throw InvalidArgument("trace is not sampled on a uniform grid (set samples_per_leg)");
        }
        const auto dzdt = path.tangent(record.samples[g.front()].t, leg);
        for (std::size_t p = 0; p < g.size(); ++p) {
            if (done[g[p]])
                continue;
            done[g[p]] = true;
            fn(g[p], g, p, dt, dzdt);
        }
    }
}

} // namespace

std::vector<cplx> derivative_along(const TraceRecord &record, const PathSpec &path, const std::vector<cplx> &values)
{
    if (values.size() != record.samples.size())
        throw InvalidArgument("sampled values do not match the trace");
    std::vector<cplx> out(values.size());
    for_each_grid_point(record, path, [&](std::size_t i, const auto &g, std::size_t p, double dt, cplx dzdt) {
        out[i] = stencil(g, p, dt, [&](std::size_t q) { return values[q]; }) / dzdt;
    });
    return out;
}

std::vector<std::vector<cplx>> covariant_derivative_along(const MetricSpec &m, const GeodesicTrace &trace,
                                                          const std::vector<std::vector<cplx>> &X,
                                                          const MetricThresholds &th)
{
    const auto &rec = trace.record;
    const auto n = m.dimension();
    if (X.size() != rec.samples.size())
        throw InvalidArgument("sampled field does not match the trace");
    for (const auto &x : X)
        if (x.size() != n)
            throw InvalidArgument("sampled field has the wrong dimension");

    std::vector<std::vector<cplx>> out(X.size(), std::vector<cplx>(n));
    for_each_grid_point(rec, trace.path, [&](std::size_t i, const auto &g, std::size_t p, double dt, cplx dzdt) {
        const auto s = unpack(rec.samples[i].z, rec.samples[i].y);
        const auto gamma = christoffel_warped(m, s.u, th);
        for (std::size_t k = 0; k < n; ++k)
            out[i][k] = stencil(g, p, dt, [&](std::size_t q) { return X[q][k]; }) / dzdt;
        for (const auto &[key, value] : gamma.entries()) {
            const auto [a, b, c] = key;
            out[i][static_cast<std::size_t>(c - 1)] +=
                value * s.udot[static_cast<std::size_t>(a - 1)] * X[i][static_cast<std::size_t>(b - 1)];
        }
    });
    return out;
}

} // namespace merogeo
