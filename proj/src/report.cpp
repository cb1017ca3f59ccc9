#include "merogeo/report.hpp"

#include <set>

namespace merogeo {

namespace {

std::string csv_preamble(const Config &config)
{
    return std::string("# merogeo ") + version() + "\n# config " + config_json(config) + "\n";
}

void json_preamble(JsonWriter &w, const Config &config)
{
    w.key("tool").value("merogeo");
    w.key("version").value(version());
    w.key("config").config(config);
}

std::string csv_field(std::string_view s)
{
    if (s.find_first_of(",\"\n") == std::string_view::npos)
        return std::string(s);
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"')
            out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string join(const std::vector<std::string> &cells)
{
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i)
            out += ',';
        out += cells[i];
    }
    return out + "\n";
}

void write_singularity(JsonWriter &w, const SingularityClass &s)
{
    w.begin_object();
    w.key("kind").value(to_string(s.kind));
    w.key("order").value(s.order);
    w.key("sheets").value(s.sheets);
    w.key("fit_slope").value(s.fit_slope);
    w.key("fit_residual").value(s.fit_residual);
    w.key("note").value(s.note);
    w.end_object();
}

void write_terminal(JsonWriter &w, const Terminal &t)
{
    w.begin_object();
    w.key("kind").value(to_string(t.kind));
    w.key("cause").value(to_string(t.cause));
    w.key("t").value(t.t);
    w.key("z").value(t.z);
    w.key("singularity");
    if (t.kind == TerminalKind::SingularStop && t.cause != StopCause::StepBudget)
        write_singularity(w, t.singularity);
    else
        w.null();
    w.end_object();
}

std::string describe(const SingularityClass &s)
{
    std::string out = to_string(s.kind);
    if (s.kind == SingularityKind::PoleLike)
        out += "(" + std::to_string(s.order) + ")";
    if (s.kind == SingularityKind::BranchLike)
        out += "(" + std::to_string(s.sheets) + ")";
    return out;
}

std::string describe(const Terminal &t)
{
    std::string out = std::string(to_string(t.kind)) + " cause=" + to_string(t.cause) + " t=" + format_double(t.t)
                      + " z=" + format_double(t.z.real()) + "," + format_double(t.z.imag());
    if (t.kind == TerminalKind::SingularStop && t.cause != StopCause::StepBudget)
        out += " singularity=" + describe(t.singularity);
    return out;
}

void require_format(Format fmt, bool text_ok)
{
    if (fmt == Format::Text && !text_ok)
        throw InvalidArgument("text format is only available for certificates");
}

} // namespace

const char *version()
{
    return MEROGEO_VERSION;
}

std::string render_trace(const GeodesicTrace &trace, Format fmt, const Config &config)
{
    require_format(fmt, false);
    const auto n = trace.dimension;
    std::vector<std::string> columns{"t", "re_z", "im_z"};
    for (std::size_t k = 1; k <= n; ++k) {
        const auto ks = std::to_string(k);
        columns.insert(columns.end(), {"re_u" + ks, "im_u" + ks, "re_udot" + ks, "im_udot" + ks});
    }
    for (std::size_t k = 1; k <= n; ++k)
        columns.push_back("residual_" + std::to_string(k));
    columns.insert(columns.end(), {"re_speed", "im_speed"});

    auto row = [&](std::size_t i) {
        const auto &s = trace.record.samples[i];
        std::vector<double> v{s.t, s.z.real(), s.z.imag()};
        for (std::size_t k = 0; k < n; ++k)
            v.insert(v.end(), {s.y[k].real(), s.y[k].imag(), s.y[n + k].real(), s.y[n + k].imag()});
        for (double r : trace.residuals[i])
            v.push_back(r);
        v.push_back(trace.speeds[i].real());
        v.push_back(trace.speeds[i].imag());
        return v;
    };

    if (fmt == Format::Csv) {
        std::string out = csv_preamble(config);
        out += "# integrals " + std::string(to_string(trace.integrals.kind));
        for (auto a : trace.integrals.A)
            out += " " + format_double(a.real()) + "," + format_double(a.imag());
        out += "\n# terminal " + describe(trace.record.terminal) + "\n";
        out += join(columns);
        for (std::size_t i = 0; i < trace.record.samples.size(); ++i) {
            std::vector<std::string> cells;
            for (double x : row(i))
                cells.push_back(format_double(x));
            out += join(cells);
        }
        return out;
    }

    JsonWriter w;
    w.begin_object();
    json_preamble(w, config);
    w.key("dimension").value(n);
    w.key("integrals").begin_object();
    w.key("case").value(to_string(trace.integrals.kind));
    w.key("A").begin_array();
    for (auto a : trace.integrals.A)
        w.value(a);
    w.end_array().end_object();
    w.key("terminal");
    write_terminal(w, trace.record.terminal);
    const auto &st = trace.record.stats;
    w.key("stats").begin_object();
    w.key("accepted").value(st.accepted);
    w.key("rejected").value(st.rejected);
    w.key("rhs_evaluations").value(st.rhs_evaluations);
    w.key("min_step").value(st.min_step);
    w.key("max_step").value(st.max_step);
    w.end_object();
    w.key("max_residual").value(trace.max_residual());
    w.key("speed_drift").value(trace.speed_drift());
    w.key("samples").begin_array();
    for (std::size_t i = 0; i < trace.record.samples.size(); ++i) {
        const auto v = row(i);
        w.begin_object();
        for (std::size_t c = 0; c < columns.size(); ++c)
            w.key(columns[c]).value(v[c]);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.str();
}

std::string render_christoffel(const ChristoffelTable &warped, const ChristoffelTable &generic,
                               std::span<const cplx> u, Format fmt, const Config &config)
{
    require_format(fmt, false);
    std::set<ChristoffelTable::Key> keys;
    for (const auto &[k, v] : warped.entries())
        keys.insert(k);
    for (const auto &[k, v] : generic.entries())
        keys.insert(k);
    const double dev = max_relative_deviation(warped, generic);

    auto rel = [](cplx x, cplx y) {
        const double s = std::max(std::abs(x), std::abs(y));
        return s == 0.0 ? 0.0 : std::abs(x - y) / s;
    };

    if (fmt == Format::Csv) {
        std::string out = csv_preamble(config);
        out += "# max_relative_deviation " + format_double(dev) + "\n";
        out += std::string("# symmetric ") + (warped.is_symmetric() && generic.is_symmetric() ? "true" : "false")
               + "\n# warped_pattern " + (generic.matches_warped_pattern() ? "true" : "false") + "\n";
        out += "i,j,k,re_warped,im_warped,re_generic,im_generic,relative_deviation\n";
        for (const auto &key : keys) {
            const auto [i, j, k] = key;
            const cplx x = warped.get(i, j, k), y = generic.get(i, j, k);
            out += join({std::to_string(i), std::to_string(j), std::to_string(k), format_double(x.real()),
                         format_double(x.imag()), format_double(y.real()), format_double(y.imag()),
                         format_double(rel(x, y))});
        }
        return out;
    }

    JsonWriter w;
    w.begin_object();
    json_preamble(w, config);
    w.key("point").begin_array();
    for (auto x : u)
        w.value(x);
    w.end_array();
    w.key("max_relative_deviation").value(dev);
    w.key("symmetric").value(warped.is_symmetric() && generic.is_symmetric());
    w.key("warped_pattern").value(generic.matches_warped_pattern());
    w.key("entries").begin_array();
    for (const auto &key : keys) {
        const auto [i, j, k] = key;
        const cplx x = warped.get(i, j, k), y = generic.get(i, j, k);
        w.begin_object();
        w.key("i").value(i);
        w.key("j").value(j);
        w.key("k").value(k);
        w.key("warped").value(x);
        w.key("generic").value(y);
        w.key("relative_deviation").value(rel(x, y));
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.str();
}

std::string render_monodromy(const MonodromyResult &res, Format fmt, const Config &config)
{
    require_format(fmt, false);
    if (fmt == Format::Csv) {
        std::string out = csv_preamble(config);
        out += std::string("# returned ") + (res.returned ? "true" : "false") + "\n# loops "
               + std::to_string(res.loops) + "\n";
        if (res.stopped)
            out += "# stopped " + describe(res.stop) + "\n";
        out += "loop,component,re_endpoint,im_endpoint,re_displacement,im_displacement\n";
        for (std::size_t l = 0; l < res.endpoints.size(); ++l)
            for (std::size_t c = 0; c < res.endpoints[l].size(); ++c) {
                const cplx e = res.endpoints[l][c];
                const cplx d = l < res.displacements.size() ? res.displacements[l][c] : cplx{};
                out += join({std::to_string(l + 1), std::to_string(c + 1), format_double(e.real()),
                             format_double(e.imag()), format_double(d.real()), format_double(d.imag())});
            }
        return out;
    }

    JsonWriter w;
    w.begin_object();
    json_preamble(w, config);
    w.key("returned").value(res.returned);
    w.key("loops").value(res.loops);
    w.key("stopped").value(res.stopped);
    w.key("stop");
    if (res.stopped)
        write_terminal(w, res.stop);
    else
        w.null();
    w.key("endpoints").begin_array();
    for (const auto &e : res.endpoints) {
        w.begin_array();
        for (auto x : e)
            w.value(x);
        w.end_array();
    }
    w.end_array();
    w.key("displacements").begin_array();
    for (const auto &d : res.displacements) {
        w.begin_array();
        for (auto x : d)
            w.value(x);
        w.end_array();
    }
    w.end_array();
    w.end_object();
    return w.str();
}

std::string render_classification(const SingularityClass &cls, cplx center, Format fmt, const Config &config)
{
    require_format(fmt, false);
    if (fmt == Format::Csv) {
        std::string out = csv_preamble(config);
        out += "kind,order,sheets,re_center,im_center,fit_slope,fit_residual,note\n";
        out += join({to_string(cls.kind), std::to_string(cls.order), std::to_string(cls.sheets),
                     format_double(center.real()), format_double(center.imag()), format_double(cls.fit_slope),
                     format_double(cls.fit_residual), csv_field(cls.note)});
        return out;
    }
    JsonWriter w;
    w.begin_object();
    json_preamble(w, config);
    w.key("center").value(center);
    w.key("classification");
    write_singularity(w, cls);
    w.end_object();
    return w.str();
}

std::string render_certificate(const Certificate &cert, Format fmt, const Config &config)
{
    if (fmt == Format::Text) {
        std::string out = std::string("merogeo ") + version() + "\nconfig " + config_json(config) + "\n\n";
        out += std::string("verdict: ") + to_string(cert.verdict) + "\n\nconditions:\n";
        for (const auto &c : cert.conditions)
            out += std::string("  [") + (c.satisfied ? "ok" : "FAILED") + "] " + c.name + ": " + c.detail + "\n";
        if (!cert.notes.empty()) {
            out += "\nnotes:\n";
            for (const auto &n : cert.notes)
                out += "  - " + n + "\n";
        }
        return out;
    }
    if (fmt == Format::Csv) {
        std::string out = csv_preamble(config);
        out += std::string("# verdict ") + to_string(cert.verdict) + "\n";
        out += "condition,satisfied,detail\n";
        for (const auto &c : cert.conditions)
            out += join({csv_field(c.name), c.satisfied ? "true" : "false", csv_field(c.detail)});
        return out;
    }
    JsonWriter w;
    w.begin_object();
    json_preamble(w, config);
    w.key("verdict").value(to_string(cert.verdict));
    w.key("conditions").begin_array();
    for (const auto &c : cert.conditions) {
        w.begin_object();
        w.key("name").value(c.name);
        w.key("satisfied").value(c.satisfied);
        w.key("detail").value(c.detail);
        w.end_object();
    }
    w.end_array();
    w.key("notes").begin_array();
    for (const auto &n : cert.notes)
        w.value(n);
    w.end_array();
    w.end_object();
    return w.str();
}

std::string render_probe(const ProbeResult &res, Format fmt, const Config &config)
{
    require_format(fmt, false);
    auto witness_of = [&](const RayOutcome &r) -> const Witness * {
        for (const auto &w : res.witnesses)
            if (w.seed == r.seed && w.ray == r.ray)
                return &w;
        return nullptr;
    };

    if (fmt == Format::Csv) {
        std::string out = csv_preamble(config);
        out += "# witnesses " + std::to_string(res.witnesses.size()) + "\n# budget_exceeded "
               + (res.budget_exceeded ? "true" : "false") + "\n# steps " + std::to_string(res.steps) + "\n";
        out += "seed,ray,angle,status,steps,stops,witness,re_z_star,im_z_star,witness_kind,singularity\n";
        for (const auto &r : res.rays) {
            const auto *wit = witness_of(r);
            std::vector<std::string> cells{std::to_string(r.seed), std::to_string(r.ray), format_double(r.angle),
                                           to_string(r.status), std::to_string(r.steps),
                                           std::to_string(r.stops.size()), wit ? "true" : "false"};
            if (wit)
                cells.insert(cells.end(), {format_double(wit->z_star.real()), format_double(wit->z_star.imag()),
                                           to_string(wit->kind),
                                           wit->kind == TerminalKind::SingularStop ? describe(wit->singularity) : ""});
            else
                cells.insert(cells.end(), {"", "", "", ""});
            out += join(cells);
        }
        return out;
    }

    JsonWriter w;
    w.begin_object();
    json_preamble(w, config);
    w.key("budget_exceeded").value(res.budget_exceeded);
    w.key("steps").value(res.steps);
    w.key("witnesses").begin_array();
    for (const auto &x : res.witnesses) {
        w.begin_object();
        w.key("seed").value(x.seed);
        w.key("ray").value(x.ray);
        w.key("angle").value(x.angle);
        w.key("direction").value(x.direction);
        w.key("z_star").value(x.z_star);
        w.key("kind").value(to_string(x.kind));
        w.key("singularity");
        if (x.kind == TerminalKind::SingularStop)
            write_singularity(w, x.singularity);
        else
            w.null();
        w.end_object();
    }
    w.end_array();
    w.key("rays").begin_array();
    for (const auto &r : res.rays) {
        w.begin_object();
        w.key("seed").value(r.seed);
        w.key("ray").value(r.ray);
        w.key("angle").value(r.angle);
        w.key("status").value(to_string(r.status));
        w.key("steps").value(r.steps);
        w.key("stops").begin_array();
        for (const auto &s : r.stops) {
            w.begin_object();
            w.key("z").value(s.z);
            w.key("kind").value(to_string(s.kind));
            w.key("cause").value(to_string(s.cause));
            w.key("restarted").value(s.restarted);
            w.key("singularity");
            write_singularity(w, s.singularity);
            w.end_object();
        }
        w.end_array();
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.str();
}

std::string render_quadcheck(const std::vector<QuadSelfTest> &tests, Format fmt, const Config &config)
{
    require_format(fmt, false);
    if (fmt == Format::Csv) {
        std::string out = csv_preamble(config);
        out += "case,points,max_error\n";
        for (const auto &t : tests)
            out += join({to_string(t.tag), std::to_string(t.points), format_double(t.max_error)});
        return out;
    }
    JsonWriter w;
    w.begin_object();
    json_preamble(w, config);
    w.key("cases").begin_array();
    for (const auto &t : tests) {
        w.begin_object();
        w.key("case").value(to_string(t.tag));
        w.key("points").value(t.points);
        w.key("max_error").value(t.max_error);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.str();
}

} // namespace merogeo
