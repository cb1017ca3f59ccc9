#include "merogeo/merogeo.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <optional>

#include "merogeo/report.hpp"

using namespace merogeo;

struct mg_metric {
    MetricSpec spec;
};
struct mg_path {
    PathSpec spec;
};
struct mg_ode {
    OdeSpec spec;
};
struct mg_esempio {
    EsempioSpec spec;
};
struct mg_trace {
    GeodesicTrace trace;
};
struct mg_config {
    Config entries;
};

namespace {

thread_local std::string last_error;

mg_status fail(mg_status s, const char *what)
{
    last_error = what;
    return s;
}

// Runs f and maps library exceptions onto status codes.
template <class F>
mg_status guarded(F &&f)
{
    try {
        f();
        last_error.clear();
        return MG_OK;
    } catch (const NumericFailure &e) {
        return fail(MG_ERR_NUMERIC, e.what());
    } catch (const BranchCutCrossing &e) {
        return fail(MG_ERR_NUMERIC, e.what());
    } catch (const IoError &e) {
        return fail(MG_ERR_IO, e.what());
    } catch (const Error &e) {
        return fail(MG_ERR_INPUT, e.what());
    } catch (const std::bad_alloc &) {
        return fail(MG_ERR_INTERNAL, "out of memory");
    } catch (const std::exception &e) {
        return fail(MG_ERR_INTERNAL, e.what());
    }
}

char *dup(const std::string &s)
{
    auto *p = static_cast<char *>(std::malloc(s.size() + 1));
    if (!p)
        throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

cplx to_cplx(mg_complex z)
{
    return {z.re, z.im};
}

mg_complex to_mg(cplx z)
{
    return {z.real(), z.imag()};
}

std::vector<cplx> vec(const mg_complex *p, std::size_t n)
{
    if (!p && n)
        throw InvalidArgument("null vector");
    std::vector<cplx> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = to_cplx(p[i]);
    return v;
}

Format format(mg_format f)
{
    switch (f) {
    case MG_FORMAT_CSV:
        return Format::Csv;
    case MG_FORMAT_JSON:
        return Format::Json;
    case MG_FORMAT_TEXT:
        return Format::Text;
    }
    throw InvalidArgument("unknown format");
}

const Config &config_of(const mg_config *c)
{
    static const Config empty;
    return c ? c->entries : empty;
}

void check_tol(double tol)
{
    if (!(tol > 0.0 && tol <= 1e-2))
        throw InvalidArgument("tol must lie in (0, 1e-2]");
}

template <class T>
void require(const T *p, const char *what)
{
    if (!p)
        throw InvalidArgument(std::string("null ") + what);
}

GeodesicState seed_state(const MetricSpec &m, cplx z0, const mg_complex *u0, const mg_complex *udot0, std::size_t n)
{
    if (n != m.dimension())
        throw InvalidArgument("initial data have " + std::to_string(n) + " components, metric has "
                              + std::to_string(m.dimension()));
    GeodesicState s{z0, vec(u0, n), vec(udot0, n)};
    m.check_domain(s.u);
    const auto ord = check_metrically_ordinary(m, s.u);
    if (!ord.ordinary)
        throw NotOrdinary("initial point is not metrically ordinary (entry " + std::to_string(ord.entry) + ")");
    return s;
}

mg_status set(mg_config *c, const char *key, ConfigValue v)
{
    return guarded([&] {
        require(c, "config");
        require(key, "key");
        c->entries.emplace_back(key, std::move(v));
    });
}

} // namespace

extern "C" {

const char *mg_version(void)
{
    return merogeo::version();
}

const char *mg_last_error(void)
{
    return last_error.c_str();
}

void mg_string_free(char *s)
{
    std::free(s);
}

mg_status mg_parse_complex(const char *text, mg_complex *out)
{
    return guarded([&] {
        require(text, "text");
        require(out, "output");
        *out = to_mg(parse_complex(text));
    });
}

mg_config *mg_config_new(void)
{
    return new (std::nothrow) mg_config{};
}

void mg_config_free(mg_config *c)
{
    delete c;
}

mg_status mg_config_set_string(mg_config *c, const char *key, const char *value)
{
    if (!value)
        return fail(MG_ERR_INPUT, "null value");
    return set(c, key, {std::string(value)});
}

mg_status mg_config_set_double(mg_config *c, const char *key, double value)
{
    return set(c, key, {value});
}

mg_status mg_config_set_int(mg_config *c, const char *key, long long value)
{
    return set(c, key, {value});
}

mg_status mg_config_set_bool(mg_config *c, const char *key, int value)
{
    return set(c, key, {value != 0});
}

// ---------------------------------------------------------------------------

mg_status mg_metric_parse(const char *text, mg_metric **out)
{
    return guarded([&] {
        require(text, "text");
        require(out, "output");
        *out = new mg_metric{parse_metric(text)};
    });
}

mg_status mg_metric_load(const char *path, mg_metric **out)
{
    return guarded([&] {
        require(path, "path");
        require(out, "output");
        *out = new mg_metric{parse_metric(read_file(path))};
    });
}

void mg_metric_free(mg_metric *m)
{
    delete m;
}

size_t mg_metric_dimension(const mg_metric *m)
{
    return m ? m->spec.dimension() : 0;
}

mg_status mg_path_parse(const char *text, mg_path **out)
{
    return guarded([&] {
        require(text, "text");
        require(out, "output");
        *out = new mg_path{parse_path(text)};
    });
}

mg_status mg_path_load(const char *path, mg_path **out)
{
    return guarded([&] {
        require(path, "path");
        require(out, "output");
        *out = new mg_path{parse_path(read_file(path))};
    });
}

void mg_path_free(mg_path *p)
{
    delete p;
}

double mg_path_arclength(const mg_path *p)
{
    return p ? p->spec.arclength() : 0.0;
}

mg_complex mg_path_start(const mg_path *p)
{
    return p ? to_mg(p->spec.start()) : mg_complex{0.0, 0.0};
}

mg_status mg_ode_parse(const char *text, mg_ode **out)
{
    return guarded([&] {
        require(text, "text");
        require(out, "output");
        *out = new mg_ode{parse_ode(text)};
    });
}

mg_status mg_ode_load(const char *path, mg_ode **out)
{
    return guarded([&] {
        require(path, "path");
        require(out, "output");
        *out = new mg_ode{parse_ode(read_file(path))};
    });
}

void mg_ode_free(mg_ode *o)
{
    delete o;
}

size_t mg_ode_dimension(const mg_ode *o)
{
    return o ? o->spec.dimension : 0;
}

mg_status mg_esempio_parse(const char *text, mg_esempio **out)
{
    return guarded([&] {
        require(text, "text");
        require(out, "output");
        *out = new mg_esempio{parse_esempio(text)};
    });
}

mg_status mg_esempio_load(const char *path, mg_esempio **out)
{
    return guarded([&] {
        require(path, "path");
        require(out, "output");
        *out = new mg_esempio{parse_esempio(read_file(path))};
    });
}

void mg_esempio_free(mg_esempio *e)
{
    delete e;
}

// ---------------------------------------------------------------------------

mg_status mg_christoffel(const mg_metric *m, const mg_complex *u, size_t n, mg_format fmt, const mg_config *config,
                         char **report, double *max_deviation)
{
    return guarded([&] {
        require(m, "metric");
        require(report, "output");
        if (n != m->spec.dimension())
            throw InvalidArgument("point has " + std::to_string(n) + " components, metric has "
                                  + std::to_string(m->spec.dimension()));
        const auto p = vec(u, n);
        m->spec.check_domain(p);
        const auto w = christoffel_warped(m->spec, p);
        const auto g = christoffel_generic(m->spec, p);
        if (max_deviation)
            *max_deviation = max_relative_deviation(w, g);
        *report = dup(render_christoffel(w, g, p, format(fmt), config_of(config)));
    });
}

mg_status mg_trace_run(const mg_metric *m, const mg_path *p, const mg_complex *u0, const mg_complex *udot0, size_t n,
                       double tol, mg_trace **out)
{
    return guarded([&] {
        require(m, "metric");
        require(p, "path");
        require(out, "output");
        check_tol(tol);
        const auto s = seed_state(m->spec, p->spec.start(), u0, udot0, n);
        *out = new mg_trace{trace_geodesic(m->spec, s, p->spec, tol)};
    });
}

void mg_trace_free(mg_trace *t)
{
    delete t;
}

size_t mg_trace_samples(const mg_trace *t)
{
    return t ? t->trace.record.samples.size() : 0;
}

mg_terminal mg_trace_terminal(const mg_trace *t)
{
    if (!t)
        return MG_COMPLETED;
    switch (t->trace.record.terminal.kind) {
    case TerminalKind::Completed:
        return MG_COMPLETED;
    case TerminalKind::SingularStop:
        return MG_SINGULAR_STOP;
    case TerminalKind::DomainExit:
        return MG_DOMAIN_EXIT;
    }
    return MG_COMPLETED;
}

mg_status mg_trace_summary(const mg_trace *t, char **out)
{
    return guarded([&] {
        require(t, "trace");
        require(out, "output");
        const auto &term = t->trace.record.terminal;
        std::string s = std::string(to_string(term.kind)) + " cause=" + to_string(term.cause)
                        + " t=" + format_double(term.t) + " z=" + format_double(term.z.real()) + ","
                        + format_double(term.z.imag());
        if (term.kind == TerminalKind::SingularStop && term.cause != StopCause::StepBudget) {
            s += std::string(" singularity=") + to_string(term.singularity.kind);
            if (term.singularity.kind == SingularityKind::PoleLike)
                s += "(" + std::to_string(term.singularity.order) + ")";
            if (term.singularity.kind == SingularityKind::BranchLike)
                s += "(" + std::to_string(term.singularity.sheets) + ")";
        }
        *out = dup(s);
    });
}

double mg_trace_max_residual(const mg_trace *t)
{
    return t ? t->trace.max_residual() : 0.0;
}

double mg_trace_speed_drift(const mg_trace *t)
{
    return t ? t->trace.speed_drift() : 0.0;
}

mg_status mg_trace_state(const mg_trace *t, size_t i, mg_complex *z, mg_complex *u, mg_complex *udot)
{
    return guarded([&] {
        require(t, "trace");
        if (i >= t->trace.record.samples.size())
            throw InvalidArgument("sample index out of range");
        const auto s = t->trace.state(i);
        if (z)
            *z = to_mg(s.z);
        for (std::size_t k = 0; k < s.u.size(); ++k) {
            if (u)
                u[k] = to_mg(s.u[k]);
            if (udot)
                udot[k] = to_mg(s.udot[k]);
        }
    });
}

mg_status mg_trace_render(const mg_trace *t, mg_format fmt, const mg_config *config, char **out)
{
    return guarded([&] {
        require(t, "trace");
        require(out, "output");
        *out = dup(render_trace(t->trace, format(fmt), config_of(config)));
    });
}

// ---------------------------------------------------------------------------

namespace {

mg_status monodromy(const OdeSystem &sys, const State &y0, const mg_path *loop, int max_loops, double tol,
                    mg_format fmt, const mg_config *config, char **report, int *returned)
{
    require(loop, "loop");
    require(report, "output");
    check_tol(tol);
    if (max_loops < 1)
        throw InvalidArgument("max loops must be at least 1");
    if (!loop->spec.is_closed(1e-9))
        throw InvalidArgument("monodromy path is not closed");
    const auto res = monodromy_probe(sys, y0, loop->spec, max_loops, tol);
    if (returned)
        *returned = res.returned ? res.loops : 0;
    *report = dup(render_monodromy(res, format(fmt), config_of(config)));
    if (res.stopped) {
        last_error = "continuation stopped inside the loop";
        return MG_ERR_NUMERIC;
    }
    last_error.clear();
    return MG_OK;
}

} // namespace

mg_status mg_monodromy_metric(const mg_metric *m, const mg_path *loop, const mg_complex *u0, const mg_complex *udot0,
                              size_t n, int max_loops, double tol, mg_format fmt, const mg_config *config,
                              char **report, int *returned)
{
    mg_status st = MG_OK;
    std::string msg;
    const auto g = guarded([&] {
        require(m, "metric");
        require(loop, "loop");
        const auto s = seed_state(m->spec, loop->spec.start(), u0, udot0, n);
        st = monodromy(geodesic_rhs(m->spec), pack(s), loop, max_loops, tol, fmt, config, report, returned);
        msg = last_error;
    });
    if (g != MG_OK)
        return g;
    last_error = msg;
    return st;
}

mg_status mg_monodromy_ode(const mg_ode *o, const mg_path *loop, const mg_complex *y0, size_t d, int max_loops,
                           double tol, mg_format fmt, const mg_config *config, char **report, int *returned)
{
    mg_status st = MG_OK;
    std::string msg;
    const auto g = guarded([&] {
        require(o, "ode");
        if (d != o->spec.dimension)
            throw InvalidArgument("initial state has " + std::to_string(d) + " components, system has "
                                  + std::to_string(o->spec.dimension));
        st = monodromy(o->spec.system(), vec(y0, d), loop, max_loops, tol, fmt, config, report, returned);
        msg = last_error;
    });
    if (g != MG_OK)
        return g;
    last_error = msg;
    return st;
}

namespace {

void classify(const OdeSystem &sys, const State &y0, const mg_path *approach, mg_complex center, double tol,
              mg_format fmt, const mg_config *config, char **report, int *kind)
{
    require(report, "output");
    check_tol(tol);
    ClassifyOptions opts;
    opts.tol = tol;
    opts.limit.tol = tol;
    const auto cls = classify_singularity(sys, y0, to_cplx(center), approach->spec, opts);
    if (kind)
        *kind = static_cast<int>(cls.kind);
    *report = dup(render_classification(cls, to_cplx(center), format(fmt), config_of(config)));
}

} // namespace

mg_status mg_classify_metric(const mg_metric *m, const mg_path *approach, mg_complex center, const mg_complex *u0,
                             const mg_complex *udot0, size_t n, double tol, mg_format fmt, const mg_config *config,
                             char **report, int *kind)
{
    return guarded([&] {
        require(m, "metric");
        require(approach, "approach");
        const auto s = seed_state(m->spec, approach->spec.start(), u0, udot0, n);
        classify(geodesic_rhs(m->spec), pack(s), approach, center, tol, fmt, config, report, kind);
    });
}

mg_status mg_classify_ode(const mg_ode *o, const mg_path *approach, mg_complex center, const mg_complex *y0, size_t d,
                          double tol, mg_format fmt, const mg_config *config, char **report, int *kind)
{
    return guarded([&] {
        require(o, "ode");
        require(approach, "approach");
        if (d != o->spec.dimension)
            throw InvalidArgument("initial state has " + std::to_string(d) + " components, system has "
                                  + std::to_string(o->spec.dimension));
        classify(o->spec.system(), vec(y0, d), approach, center, tol, fmt, config, report, kind);
    });
}

mg_status mg_coercive(const mg_esempio *e, mg_format fmt, const mg_config *config, char **report, mg_verdict *verdict)
{
    return guarded([&] {
        require(e, "spec");
        require(report, "output");
        const auto cert = check_esempio_coercive(e->spec);
        if (verdict)
            *verdict = cert.verdict == Verdict::Coercive ? MG_COERCIVE : MG_NOT_CERTIFIED;
        *report = dup(render_certificate(cert, format(fmt), config_of(config)));
    });
}

mg_status mg_probe(const mg_metric *m, mg_complex z0, const mg_complex *u0, const mg_complex *udot0, size_t n,
                   int rays, double radius, double tol, uint64_t budget, mg_format fmt, const mg_config *config,
                   char **report, size_t *witnesses, int *budget_exceeded)
{
    return guarded([&] {
        require(m, "metric");
        require(report, "output");
        check_tol(tol);
        if (rays < 1)
            throw InvalidArgument("need at least one ray");
        if (!(radius > 0.0) || !std::isfinite(radius))
            throw InvalidArgument("radius must be positive");
        ProbeOptions opts;
        opts.rays = rays;
        opts.radius = radius;
        opts.tol = tol;
        if (budget)
            opts.budget = budget;
        const auto res = incompleteness_probe(m->spec, {seed_state(m->spec, to_cplx(z0), u0, udot0, n)}, opts);
        if (witnesses)
            *witnesses = res.witnesses.size();
        if (budget_exceeded)
            *budget_exceeded = res.budget_exceeded ? 1 : 0;
        *report = dup(render_probe(res, format(fmt), config_of(config)));
    });
}

mg_status mg_quadcheck(mg_complex a, mg_complex b, mg_complex c, int points, uint64_t seed, mg_format fmt,
                       const mg_config *config, char **report, double *max_error)
{
    return guarded([&] {
        require(report, "output");
        const auto t = quad_check(to_cplx(a), to_cplx(b), to_cplx(c), points, seed);
        if (max_error)
            *max_error = t.max_error;
        *report = dup(render_quadcheck({t}, format(fmt), config_of(config)));
    });
}

mg_status mg_write_file_atomic(const char *path, const char *data, size_t size)
{
    return guarded([&] {
        require(path, "path");
        require(data, "data");
        write_file_atomic(path, std::string_view(data, size));
    });
}

} // extern "C"
