#include "merogeo/continuation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace merogeo {

OdeSystem::OdeSystem(std::size_t dimension, Rhs rhs) : dim_(dimension), rhs_(std::move(rhs))
{
    if (dim_ == 0)
        throw InvalidArgument("ODE system dimension must be positive");
    if (!rhs_)
        throw InvalidArgument("ODE system needs a right-hand side");
}

const char *to_string(SingularityKind kind)
{
    switch (kind) {
    case SingularityKind::Removable: return "Removable";
    case SingularityKind::PoleLike: return "PoleLike";
    case SingularityKind::BranchLike: return "BranchLike";
    case SingularityKind::Logarithmic: return "Logarithmic";
    case SingularityKind::Undetermined: return "Undetermined";
    }
    return "?";
}

const char *to_string(TerminalKind kind)
{
    switch (kind) {
    case TerminalKind::Completed: return "Completed";
    case TerminalKind::SingularStop: return "SingularStop";
    case TerminalKind::DomainExit: return "DomainExit";
    }
    return "?";
}

const char *to_string(StopCause cause)
{
    switch (cause) {
    case StopCause::None: return "none";
    case StopCause::Pole: return "pole";
    case StopCause::StepUnderflow: return "step-underflow";
    case StopCause::NonFinite: return "non-finite";
    case StopCause::StepBudget: return "step-budget";
    }
    return "?";
}

namespace {

// Dormand-Prince 5(4).
constexpr std::array<double, 7> C{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200,
                 E6 = 22.0 / 525, E7 = -1.0 / 40;

bool all_finite(std::span<const cplx> y)
{
    return std::all_of(y.begin(), y.end(),
                       [](cplx c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

double max_norm(std::span<const cplx> y)
{
    double m = 0.0;
    for (auto c : y)
        m = std::max(m, std::abs(c));
    return m;
}

// dy/dt on one leg of the path.
class LegField {
public:
    LegField(const OdeSystem &sys, const PathSpec &path, std::size_t leg, StepStats &stats)
        : sys_(sys), path_(path), leg_(leg), stats_(stats)
    {}

    bool operator()(double t, std::span<const cplx> y, std::span<cplx> out) const
    {
        ++stats_.rhs_evaluations;
        const auto z = path_.point_on_leg(t, leg_);
        if (sys_(z, y, out) != RhsStatus::Ok)
            return false;
        const auto dz = path_.tangent(t, leg_);
        for (auto &v : out)
            v *= dz;
        return all_finite(out);
    }

private:
    const OdeSystem &sys_;
    const PathSpec &path_;
    std::size_t leg_;
    StepStats &stats_;
};

struct StepResult {
    bool ok = false; // false: a stage hit a pole or went non-finite
    State y;
    State err;
    State k_end; // derivative at the new point (FSAL)
};

class DopriStepper {
public:
    explicit DopriStepper(std::size_t n) : k_(7, State(n)), tmp_(n) {}

    StepResult step(const LegField &f, double t, const State &y, const State &k1, double h)
    {
        const auto n = y.size();
        StepResult r;
        k_[0] = k1;
        auto stage = [&](int s, auto coeffs) {
            for (std::size_t i = 0; i < n; ++i) {
                cplx acc{};
                for (std::size_t j = 0; j < coeffs.size(); ++j)
                    acc += coeffs[j] * k_[j][i];
                tmp_[i] = y[i] + h * acc;
            }
            return f(t + C[static_cast<std::size_t>(s)] * h, tmp_, k_[static_cast<std::size_t>(s)]);
        };
        if (!stage(1, std::array{A21}))
            return r;
        if (!stage(2, std::array{A31, A32}))
            return r;
        if (!stage(3, std::array{A41, A42, A43}))
            return r;
        if (!stage(4, std::array{A51, A52, A53, A54}))
            return r;
        if (!stage(5, std::array{A61, A62, A63, A64, A65}))
            return r;
        r.y.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            r.y[i] = y[i] + h * (B1 * k_[0][i] + B3 * k_[2][i] + B4 * k_[3][i] + B5 * k_[4][i] + B6 * k_[5][i]);
        if (!all_finite(r.y))
            return r;
        if (!f(t + h, r.y, k_[6]))
            return r;
        r.err.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            r.err[i] = h * (E1 * k_[0][i] + E3 * k_[2][i] + E4 * k_[3][i] + E5 * k_[4][i] + E6 * k_[5][i]
                            + E7 * k_[6][i]);
        r.k_end = k_[6];
        r.ok = true;
        return r;
    }

private:
    std::vector<State> k_;
    State tmp_;
};

double error_norm(const State &err, const State &y0, const State &y1, double tol)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < err.size(); ++i) {
        const double scale = tol * std::max({1.0, std::abs(y0[i]), std::abs(y1[i])});
        worst = std::max(worst, std::abs(err[i]) / scale);
    }
    return worst;
}

} // namespace

TraceRecord integrate_along(const OdeSystem &sys, const State &y0, const PathSpec &path, double tol,
                            const IntegrateOptions &opts)
{
    if (!(tol > 0.0))
        throw InvalidArgument("tolerance must be positive");
    if (y0.size() != sys.dimension())
        throw InvalidArgument("initial state has the wrong dimension");
    if (opts.boundary && !(opts.boundary(y0) < 0.0))
        throw DomainViolation("initial state lies outside the monitored region");

    TraceRecord rec;
    const double length = path.arclength();
    auto stop = [&](TerminalKind kind, StopCause cause, double t, cplx z) {
        rec.terminal.kind = kind;
        rec.terminal.cause = cause;
        rec.terminal.t = t;
        rec.terminal.z = z;
        if (kind == TerminalKind::SingularStop)
            rec.terminal.singularity = SingularityClass::undetermined("continuation stopped: " + std::string(to_string(cause)));
        return rec;
    };

    rec.samples.push_back({0.0, path.start(), y0, 0});
    if (!all_finite(y0))
        return stop(TerminalKind::SingularStop, StopCause::NonFinite, 0.0, path.start());

    State y = y0;
    State k1(y0.size());
    DopriStepper stepper(y0.size());
    double t = 0.0;
    double h = std::max(opts.initial_step, opts.min_step);
    double err_old = 1e-4;
    const auto n_legs = path.legs().size();

    for (std::size_t leg = 0; leg < n_legs; ++leg) {
        LegField field(sys, path, leg, rec.stats);
        const double t_lo = path.leg_t(leg);
        const double t_hi = path.leg_t(leg + 1);
        t = t_lo;
        if (!field(t, y, k1))
            return stop(TerminalKind::SingularStop, StopCause::Pole, t, path.point_on_leg(t, leg));

        const std::size_t grid = opts.samples_per_leg;
        std::size_t next_grid = 1;
        auto target_of = [&](std::size_t j) {
            return j >= grid ? t_hi : t_lo + (t_hi - t_lo) * static_cast<double>(j) / static_cast<double>(grid);
        };
        double target = grid ? target_of(next_grid) : t_hi;

        while (t < t_hi) {
            if (rec.stats.accepted + rec.stats.rejected >= opts.max_steps)
                return stop(TerminalKind::SingularStop, StopCause::StepBudget, t, path.point_on_leg(t, leg));
            if (h < opts.min_step)
                return stop(TerminalKind::SingularStop, StopCause::StepUnderflow, t, path.point_on_leg(t, leg));

            double h_try = h;
            bool clipped = false;
            if (t + h_try >= target - 1e-15 * std::max(1.0, std::abs(target))) {
                h_try = target - t;
                clipped = true;
            }

            auto r = stepper.step(field, t, y, k1, h_try);
            if (!r.ok) {
                ++rec.stats.rejected;
                h = h_try * 0.25;
                continue;
            }
            const double err = error_norm(r.err, y, r.y, tol);
            if (err > 1.0) {
                ++rec.stats.rejected;
                const double fac11 = std::pow(err, 0.17);
                h = h_try / std::min(5.0, fac11 / 0.9);
                continue;
            }

            double t_new = clipped ? target : t + h_try;
            State y_new = std::move(r.y);
            State k_new = std::move(r.k_end);

            // Region crossing: locate the exit by bisection on the step length.
            if (opts.boundary && !(opts.boundary(y_new) < 0.0)) {
                double lo = 0.0, hi = h_try;
                State y_hi = y_new;
                for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, t); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    auto rm = stepper.step(field, t, y, k1, mid);
                    if (!rm.ok)
                        break;
                    if (opts.boundary(rm.y) < 0.0)
                        lo = mid;
                    else {
                        hi = mid;
                        y_hi = rm.y;
                    }
                }
                ++rec.stats.accepted;
                const double t_exit = t + hi;
                const auto z_exit = path.point_on_leg(t_exit, leg);
                rec.samples.push_back({t_exit, z_exit, y_hi, leg});
                return stop(TerminalKind::DomainExit, StopCause::None, t_exit, z_exit);
            }

            ++rec.stats.accepted;
            rec.stats.min_step = std::min(rec.stats.min_step, h_try * length);
            rec.stats.max_step = std::max(rec.stats.max_step, h_try * length);

            // PI control (Hairer's DOPRI5 constants).
            const double fac11 = std::pow(std::max(err, 1e-300), 0.17);
            double fac = fac11 / std::pow(err_old, 0.04);
            fac = std::clamp(fac / 0.9, 0.1, 5.0);
            const double h_next = h_try / fac;
            err_old = std::max(err, 1e-4);
            h = clipped ? std::max(h_next, h) : h_next;

            t = t_new;
            y = std::move(y_new);
            k1 = std::move(k_new);

            const bool on_grid = clipped && grid && target != t_hi;
            if (!grid || on_grid || t >= t_hi)
                rec.samples.push_back({t, path.point_on_leg(t, leg), y, leg});
            if (clipped) {
                if (grid) {
                    ++next_grid;
                    target = target_of(next_grid);
                }
            }
        }
        if (leg + 1 < n_legs) {
            // Leg boundaries are shared: the next leg's first point equals this endpoint.
            t = t_hi;
        }
    }
    rec.terminal.kind = TerminalKind::Completed;
    rec.terminal.t = 1.0;
    rec.terminal.z = path.end();
    return rec;
}

// ---------------------------------------------------------------------------

MonodromyResult monodromy_probe(const OdeSystem &sys, const State &y0, const PathSpec &loop, int max_loops,
                                double tol, const MonodromyOptions &opts)
{
    if (!loop.is_closed())
        throw InvalidArgument("monodromy loop must be closed");
    if (max_loops < 1)
        throw InvalidArgument("max_loops must be at least 1");
    if (!(tol > 0.0))
        throw InvalidArgument("tolerance must be positive");

    const double itol = opts.integration_tol > 0.0 ? opts.integration_tol : std::max(tol * 1e-3, 1e-14);
    const auto z0 = loop.start();
    const double y_scale = 1.0 + max_norm(y0);

    State f0(y0.size());
    const bool f0_finite = sys(z0, y0, f0) == RhsStatus::Ok && all_finite(f0);
    const double f_scale = 1.0 + max_norm(f0);

    MonodromyResult res;
    State y = y0;
    for (int k = 1; k <= max_loops; ++k) {
        auto trace = integrate_along(sys, y, loop, itol);
        if (trace.terminal.kind != TerminalKind::Completed) {
            res.stopped = true;
            res.stop = trace.terminal;
            res.loops = k - 1;
            return res;
        }
        const auto &yk = trace.final_state();
        State d(y.size());
        for (std::size_t i = 0; i < y.size(); ++i)
            d[i] = yk[i] - y[i];
        res.displacements.push_back(d);
        res.endpoints.push_back(yk);
        y = yk;

        double dist = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i)
            dist = std::max(dist, std::abs(y[i] - y0[i]));
        bool back = dist <= tol * y_scale;
        if (back && f0_finite) {
            State fk(y.size());
            if (sys(z0, y, fk) == RhsStatus::Ok) {
                double fd = 0.0;
                for (std::size_t i = 0; i < y.size(); ++i)
                    fd = std::max(fd, std::abs(fk[i] - f0[i]));
                back = fd <= tol * f_scale;
            } else {
                back = false;
            }
        }
        if (back) {
            res.returned = true;
            res.loops = k;
            return res;
        }
    }
    res.loops = max_loops;
    return res;
}

// ---------------------------------------------------------------------------

double chordal_distance(const ExtComplex &x, const ExtComplex &y)
{
    if (x.infinite && y.infinite)
        return 0.0;
    if (x.infinite)
        return 2.0 / std::hypot(1.0, std::abs(y.value));
    if (y.infinite)
        return 2.0 / std::hypot(1.0, std::abs(x.value));
    return 2.0 * std::abs(x.value - y.value) / (std::hypot(1.0, std::abs(x.value)) * std::hypot(1.0, std::abs(y.value)));
}

bool LimitResult::converged_to_infinity() const
{
    return kind == LimitKind::Converged
           && std::any_of(value.begin(), value.end(), [](const ExtComplex &v) { return v.infinite; });
}

namespace {

double state_chordal(const State &a, const State &b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, chordal_distance(ExtComplex::finite(a[i]), ExtComplex::finite(b[i])));
    return d;
}

} // namespace

LimitResult radial_limit(const OdeSystem &sys, const State &y0, const PathSpec &ray, const LimitOptions &opts)
{
    if (!(opts.shrink > 0.0 && opts.shrink < 1.0))
        throw InvalidArgument("shrink factor must lie in (0, 1)");
    LimitResult res;
    const double length = ray.arclength();
    double t_prev = 0.0;
    State y = y0;
    double frac = opts.first_fraction;

    for (int k = 0; k < opts.max_samples && frac >= opts.min_fraction; ++k, frac *= opts.shrink) {
        const double t_k = 1.0 - frac;
        if (t_k <= t_prev)
            continue;
        auto trace = integrate_along(sys, y, ray.subpath(t_prev, t_k), opts.tol);
        if (trace.terminal.kind != TerminalKind::Completed) {
            res.stop = trace.terminal;
            res.kind = LimitKind::Stopped;
            return res;
        }
        y = trace.final_state();
        t_prev = t_k;
        res.samples.push_back({frac * length, ray.point(t_k), y});

        const auto m = res.samples.size();
        if (m < 2)
            continue;
        res.chordal_steps.push_back(state_chordal(res.samples[m - 2].y, res.samples[m - 1].y));
        const auto &steps = res.chordal_steps;
        const auto s = steps.size();

        if (s >= 2 && steps[s - 1] < opts.chordal_tol && steps[s - 2] < 100.0 * opts.chordal_tol) {
            const double ratio = std::min(steps[s - 1] / std::max(steps[s - 2], 1e-300), 0.95);
            const double tail = std::max(steps[s - 1] * ratio / (1.0 - ratio), opts.chordal_tol);
            res.kind = LimitKind::Converged;
            for (auto v : y) {
                const double to_inf = chordal_distance(ExtComplex::finite(v), ExtComplex::pole());
                res.value.push_back(to_inf <= 4.0 * tail ? ExtComplex::pole() : ExtComplex::finite(v));
            }
            return res;
        }
        if (s >= static_cast<std::size_t>(opts.window)) {
            // Oscillation: steps stay large and the later half of the window
            // has not contracted against the earlier half.
            const auto half = static_cast<std::size_t>(opts.window / 2);
            std::vector<double> early(steps.end() - opts.window, steps.end() - static_cast<long>(half));
            std::vector<double> late(steps.end() - static_cast<long>(half), steps.end());
            auto median = [](std::vector<double> v) {
                std::sort(v.begin(), v.end());
                return v[v.size() / 2];
            };
            const double m_early = median(early);
            const double m_late = median(late);
            if (m_late > opts.oscillation_floor && m_late > 0.5 * m_early) {
                res.kind = LimitKind::NoLimit;
                return res;
            }
        }
    }
    res.kind = LimitKind::NoLimit;
    return res;
}

GrowthFit fit_growth(const LimitResult &limit, int count)
{
    GrowthFit best;
    const auto n = limit.samples.size();
    if (count < 3 || n < static_cast<std::size_t>(count))
        return best;
    const auto dim = limit.samples.front().y.size();
    for (std::size_t c = 0; c < dim; ++c) {
        if (!limit.value.empty() && !limit.value[c].infinite)
            continue;
        std::vector<double> xs, ys;
        for (auto i = n - static_cast<std::size_t>(count); i < n; ++i) {
            const double mag = std::abs(limit.samples[i].y[c]);
            if (!(mag > 0.0))
                break;
            xs.push_back(std::log(limit.samples[i].distance));
            ys.push_back(std::log(mag));
        }
        if (xs.size() != static_cast<std::size_t>(count))
            continue;
        const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / count;
        const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / count;
        double sxx = 0.0, sxy = 0.0;
        for (int i = 0; i < count; ++i) {
            sxx += (xs[i] - mx) * (xs[i] - mx);
            sxy += (xs[i] - mx) * (ys[i] - my);
        }
        if (!(sxx > 0.0))
            continue;
        const double slope = sxy / sxx;
        double ss = 0.0;
        for (int i = 0; i < count; ++i) {
            const double r = ys[i] - (my + slope * (xs[i] - mx));
            ss += r * r;
        }
        const double residual = std::sqrt(ss / count);
        // Slowest divergence (largest slope) names the order of the solution itself.
        if (!best.ok || slope > best.slope) {
            best = {slope, residual, true};
        }
    }
    return best;
}

namespace {

// Largest t at which the approach is still at distance >= radius from center.
double parameter_at_distance(const PathSpec &approach, cplx center, double radius)
{
    constexpr int grid = 2000;
    double hi = 1.0;
    double lo = -1.0;
    for (int i = grid - 1; i >= 0; --i) {
        const double t = static_cast<double>(i) / grid;
        if (std::abs(approach.point(t) - center) >= radius) {
            lo = t;
            break;
        }
        hi = t;
    }
    if (lo < 0.0)
        return -1.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (std::abs(approach.point(mid) - center) >= radius)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

bool stationary_displacement(const MonodromyResult &m, double variation, State &mean_out)
{
    if (m.returned || m.stopped || m.displacements.size() < 3)
        return false;
    const auto &d1 = m.displacements.front();
    const double ref = max_norm(d1);
    if (!(ref > 0.0))
        return false;
    for (const auto &d : m.displacements) {
        double diff = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i)
            diff = std::max(diff, std::abs(d[i] - d1[i]));
        if (diff > variation * ref)
            return false;
    }
    mean_out = d1;
    return true;
}

} // namespace

SingularityClass classify_singularity(const OdeSystem &sys, const State &y0, cplx center, const PathSpec &approach,
                                      const ClassifyOptions &opts)
{
    if (std::abs(approach.end() - center) > 1e-9 * (1.0 + std::abs(center)))
        throw InvalidArgument("approach path must end at the suspected singularity");

    const double start_dist = std::abs(approach.start() - center);
    const double r0 = opts.loop_radius > 0.0 ? opts.loop_radius : 0.5 * start_dist;
    const double radii[2] = {r0, 0.5 * r0};

    MonodromyResult probes[2];
    double t_prev = 0.0;
    State y = y0;
    for (int j = 0; j < 2; ++j) {
        const double tj = parameter_at_distance(approach, center, radii[j]);
        if (tj < 0.0 || tj < t_prev)
            return SingularityClass::undetermined("loop radius not reachable along the approach");
        if (tj > t_prev) {
            auto leg = integrate_along(sys, y, approach.subpath(t_prev, tj), opts.tol);
            if (leg.terminal.kind != TerminalKind::Completed)
                return SingularityClass::undetermined("approach stopped before the probe loops");
            y = leg.final_state();
        }
        t_prev = tj;
        const auto loop = PathSpec::circle(center, approach.point(tj));
        probes[j] = monodromy_probe(sys, y, loop, opts.max_loops, opts.tol);
        if (probes[j].stopped)
            return SingularityClass::undetermined("integration stopped on a probe loop");
    }

    if (probes[0].returned && probes[1].returned && probes[0].loops == probes[1].loops && probes[0].loops >= 2)
        return SingularityClass::branch_like(probes[0].loops);

    State d0, d1;
    if (stationary_displacement(probes[0], opts.log_variation, d0)
        && stationary_displacement(probes[1], opts.log_variation, d1)) {
        double diff = 0.0;
        for (std::size_t i = 0; i < d0.size(); ++i)
            diff = std::max(diff, std::abs(d0[i] - d1[i]));
        if (diff <= opts.log_variation * max_norm(d0))
            return SingularityClass::logarithmic();
    }

    if (!(probes[0].returned && probes[1].returned && probes[0].loops == 1 && probes[1].loops == 1))
        return SingularityClass::undetermined("monodromy neither trivial nor a recognized branch or logarithm");

    auto limit = radial_limit(sys, y, approach.subpath(t_prev, 1.0), opts.limit);
    if (limit.kind == LimitKind::Converged && !limit.converged_to_infinity())
        return SingularityClass::removable();
    if (limit.kind == LimitKind::Converged) {
        const auto fit = fit_growth(limit, opts.fit_samples);
        if (fit.ok && fit.residual < opts.fit_residual_max && -fit.slope >= 0.5) {
            auto cls = SingularityClass::pole_like(std::max(1, static_cast<int>(std::lround(-fit.slope))));
            cls.fit_slope = fit.slope;
            cls.fit_residual = fit.residual;
            return cls;
        }
        auto cls = SingularityClass::undetermined("diverges without power-law growth");
        if (fit.ok) {
            cls.fit_slope = fit.slope;
            cls.fit_residual = fit.residual;
        }
        return cls;
    }
    return SingularityClass::undetermined(limit.kind == LimitKind::NoLimit
                                              ? "single-valued but no limit along the approach"
                                              : "integration stopped on the approach");
}

} // namespace merogeo
