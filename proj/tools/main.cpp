// merogeo command-line front end. Talks to the library only through merogeo.h.
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "merogeo/merogeo.h"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_input = 2;
constexpr int exit_numeric = 3;
constexpr int exit_witness = 4;

struct Failure {
    int code;
    std::string message;
};

int exit_code(mg_status s)
{
    switch (s) {
    case MG_OK:
        return exit_ok;
    case MG_ERR_INPUT:
    case MG_ERR_IO:
        return exit_input;
    case MG_ERR_NUMERIC:
        return exit_numeric;
    case MG_ERR_INTERNAL:
        break;
    }
    return 1;
}

void check(mg_status s, const std::string &context)
{
    if (s != MG_OK)
        throw Failure{exit_code(s), context + ": " + mg_last_error()};
}

template <class T, void (*Free)(T *)>
struct Deleter {
    void operator()(T *p) const { Free(p); }
};
using MetricPtr = std::unique_ptr<mg_metric, Deleter<mg_metric, mg_metric_free>>;
using PathPtr = std::unique_ptr<mg_path, Deleter<mg_path, mg_path_free>>;
using OdePtr = std::unique_ptr<mg_ode, Deleter<mg_ode, mg_ode_free>>;
using EsempioPtr = std::unique_ptr<mg_esempio, Deleter<mg_esempio, mg_esempio_free>>;
using TracePtr = std::unique_ptr<mg_trace, Deleter<mg_trace, mg_trace_free>>;
using ConfigPtr = std::unique_ptr<mg_config, Deleter<mg_config, mg_config_free>>;
using StringPtr = std::unique_ptr<char, Deleter<char, mg_string_free>>;

std::string fmt(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt(mg_complex z)
{
    char buf[90];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.re, z.im);
    return buf;
}

std::vector<mg_complex> complex_list(const std::string &text, const char *what)
{
    std::vector<mg_complex> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        mg_complex z{};
        check(mg_parse_complex(item.c_str(), &z), std::string("--") + what);
        out.push_back(z);
    }
    if (out.empty())
        throw Failure{exit_input, std::string("--") + what + ": empty list"};
    return out;
}

std::string render_list(const std::vector<mg_complex> &v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out += (i ? "," : "") + fmt(v[i]);
    return out;
}

std::string read_text(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Failure{exit_input, "cannot read '" + path + "'"};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ODE files declare `dim`; metric files declare `N`.
bool is_ode_file(const std::string &text)
{
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        const auto b = line.find_first_not_of(" \t");
        if (b != std::string::npos && line.compare(b, 3, "dim") == 0)
            return true;
    }
    return false;
}

MetricPtr load_metric(const std::string &path)
{
    mg_metric *m = nullptr;
    check(mg_metric_load(path.c_str(), &m), path);
    return MetricPtr(m);
}

PathPtr load_path(const std::string &path)
{
    mg_path *p = nullptr;
    check(mg_path_load(path.c_str(), &p), path);
    return PathPtr(p);
}

struct Run {
    std::string out_dir = ".";
    std::string format = "csv";
    double tol = 1e-10;
    std::uint64_t seed = 0;
    ConfigPtr config{mg_config_new()};

    mg_format mg() const { return format == "json" ? MG_FORMAT_JSON : MG_FORMAT_CSV; }
    std::string ext() const { return format == "json" ? ".json" : ".csv"; }

    void put(const char *key, const std::string &v) { check(mg_config_set_string(config.get(), key, v.c_str()), "config"); }
    void put(const char *key, double v) { check(mg_config_set_double(config.get(), key, v), "config"); }
    void put(const char *key, long long v) { check(mg_config_set_int(config.get(), key, v), "config"); }

    void begin(const std::string &command)
    {
        put("command", command);
        put("tol", tol);
        put("out_dir", out_dir);
        put("format", format);
        put("seed", static_cast<long long>(seed));
    }

    std::string write(const std::string &name, char *data) const
    {
        StringPtr owned(data);
        const auto path = (std::filesystem::path(out_dir) / name).string();
        check(mg_write_file_atomic(path.c_str(), owned.get(), std::strlen(owned.get())), "writing output");
        return path;
    }
};

double default_tol()
{
    const char *env = std::getenv("MEROGEO_TOL");
    if (!env || !*env)
        return 1e-10;
    char *end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0')
        throw Failure{exit_input, std::string("MEROGEO_TOL is not a number: ") + env};
    return v;
}

} // namespace

int main(int argc, char **argv)
{
    Run run;
    try {
        run.tol = default_tol();
    } catch (const Failure &f) {
        std::cerr << "merogeo: " << f.message << "\n";
        return f.code;
    }

    CLI::App app{"Geodesics of meromorphic warped-product metrics"};
    app.set_version_flag("--version", std::string(mg_version()));
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--out-dir", run.out_dir, "Directory for output files")->capture_default_str();
    app.add_option("--format", run.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--tol", run.tol, "Integration tolerance in (0, 1e-2]; default from MEROGEO_TOL")
        ->capture_default_str();
    app.add_option("--seed", run.seed, "Seed for randomized sample points")->capture_default_str();

    std::string metric_file, path_file, spec_file, coefficients;
    std::string at, u0, udot0, y0, center, z0 = "0";
    int max_loops = 4, rays = 32, points = 100;
    double radius = 50.0;
    std::uint64_t budget = 0;

    auto *christoffel = app.add_subcommand("christoffel", "Both Christoffel tables and their deviation");
    christoffel->add_option("metric", metric_file)->required();
    christoffel->add_option("--at", at, "Point u1,...,uN")->required();

    auto *trace = app.add_subcommand("trace", "Geodesic trace along a path");
    trace->add_option("metric", metric_file)->required();
    trace->add_option("path", path_file)->required();
    trace->add_option("--u0", u0)->required();
    trace->add_option("--udot0", udot0)->required();

    auto *monodromy = app.add_subcommand("monodromy", "Continuation around a closed loop");
    monodromy->add_option("system", spec_file, "Metric or ODE file")->required();
    monodromy->add_option("loop", path_file)->required();
    monodromy->add_option("--max-loops", max_loops)->capture_default_str();
    monodromy->add_option("--u0", u0);
    monodromy->add_option("--udot0", udot0);
    monodromy->add_option("--y0", y0);

    auto *classify = app.add_subcommand("classify", "Classify the singularity at the end of an approach");
    classify->add_option("system", spec_file, "Metric or ODE file")->required();
    classify->add_option("approach", path_file)->required();
    classify->add_option("--center", center)->required();
    classify->add_option("--u0", u0);
    classify->add_option("--udot0", udot0);
    classify->add_option("--y0", y0);

    auto *coercive = app.add_subcommand("coercive", "Coercivity certificate for an example-class spec");
    coercive->add_option("spec", spec_file)->required();

    auto *probe = app.add_subcommand("probe", "Fan of rays looking for incomplete geodesics");
    probe->add_option("metric", metric_file)->required();
    probe->add_option("--rays", rays)->capture_default_str();
    probe->add_option("--radius", radius)->capture_default_str();
    probe->add_option("--u0", u0)->required();
    probe->add_option("--udot0", udot0)->required();
    probe->add_option("--z0", z0)->capture_default_str();
    probe->add_option("--budget", budget, "Total integration steps; 0 keeps the default")->capture_default_str();

    auto *quadcheck = app.add_subcommand("quadcheck", "Derivative self-test of 1/sqrt(a x^2 + b x + c)");
    quadcheck->add_option("coefficients", coefficients, "a,b,c")->required();
    quadcheck->add_option("--points", points)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return exit_input;
    }

    try {
        if (!(run.tol > 0.0 && run.tol <= 1e-2))
            throw Failure{exit_input, "tol must lie in (0, 1e-2], got " + fmt(run.tol)};
        std::error_code ec;
        std::filesystem::create_directories(run.out_dir, ec);
        if (!std::filesystem::is_directory(run.out_dir))
            throw Failure{exit_input, "output directory '" + run.out_dir + "' cannot be created"};

        if (christoffel->parsed()) {
            const auto point = complex_list(at, "at");
            run.begin("christoffel");
            run.put("metric", metric_file);
            run.put("at", render_list(point));
            auto m = load_metric(metric_file);
            char *report = nullptr;
            double dev = 0.0;
            check(mg_christoffel(m.get(), point.data(), point.size(), run.mg(), run.config.get(), &report, &dev),
                  "christoffel");
            const auto file = run.write("christoffel" + run.ext(), report);
            std::cout << "max relative deviation " << fmt(dev) << "\nwrote " << file << "\n";
            return exit_ok;
        }

        if (trace->parsed()) {
            const auto u = complex_list(u0, "u0");
            const auto v = complex_list(udot0, "udot0");
            if (u.size() != v.size())
                throw Failure{exit_input, "--u0 and --udot0 differ in length"};
            run.begin("trace");
            run.put("metric", metric_file);
            run.put("path", path_file);
            run.put("u0", render_list(u));
            run.put("udot0", render_list(v));
            auto m = load_metric(metric_file);
            auto p = load_path(path_file);
            mg_trace *t = nullptr;
            check(mg_trace_run(m.get(), p.get(), u.data(), v.data(), u.size(), run.tol, &t), "trace");
            TracePtr owned(t);
            char *data = nullptr;
            check(mg_trace_render(t, run.mg(), run.config.get(), &data), "trace");
            const auto file = run.write("trace" + run.ext(), data);
            char *summary = nullptr;
            check(mg_trace_summary(t, &summary), "trace");
            StringPtr s(summary);
            std::cout << "terminal " << s.get() << "\nmax residual " << fmt(mg_trace_max_residual(t))
                      << "\nspeed drift " << fmt(mg_trace_speed_drift(t)) << "\nwrote " << file << "\n";
            return exit_ok;
        }

        if (monodromy->parsed() || classify->parsed()) {
            const bool mono = monodromy->parsed();
            const auto text = read_text(spec_file);
            const bool ode = is_ode_file(text);
            run.begin(mono ? "monodromy" : "classify");
            run.put(ode ? "ode" : "metric", spec_file);
            run.put(mono ? "loop" : "approach", path_file);
            auto p = load_path(path_file);
            mg_complex c{};
            if (!mono) {
                check(mg_parse_complex(center.c_str(), &c), "--center");
                run.put("center", fmt(c));
            } else {
                run.put("max_loops", static_cast<long long>(max_loops));
            }

            char *report = nullptr;
            mg_status st = MG_OK;
            int result = 0;
            if (ode) {
                if (y0.empty())
                    throw Failure{exit_input, "an ODE file needs --y0"};
                const auto y = complex_list(y0, "y0");
                run.put("y0", render_list(y));
                mg_ode *o = nullptr;
                check(mg_ode_parse(text.c_str(), &o), spec_file);
                OdePtr owned(o);
                st = mono ? mg_monodromy_ode(o, p.get(), y.data(), y.size(), max_loops, run.tol, run.mg(),
                                             run.config.get(), &report, &result)
                          : mg_classify_ode(o, p.get(), c, y.data(), y.size(), run.tol, run.mg(), run.config.get(),
                                            &report, &result);
            } else {
                if (u0.empty() || udot0.empty())
                    throw Failure{exit_input, "a metric file needs --u0 and --udot0"};
                const auto u = complex_list(u0, "u0");
                const auto v = complex_list(udot0, "udot0");
                if (u.size() != v.size())
                    throw Failure{exit_input, "--u0 and --udot0 differ in length"};
                run.put("u0", render_list(u));
                run.put("udot0", render_list(v));
                auto m = load_metric(spec_file);
                st = mono ? mg_monodromy_metric(m.get(), p.get(), u.data(), v.data(), u.size(), max_loops, run.tol,
                                                run.mg(), run.config.get(), &report, &result)
                          : mg_classify_metric(m.get(), p.get(), c, u.data(), v.data(), u.size(), run.tol, run.mg(),
                                               run.config.get(), &report, &result);
            }
            const std::string error = st == MG_OK ? "" : mg_last_error();
            std::string file;
            if (report)
                file = run.write(std::string(mono ? "monodromy" : "classify") + run.ext(), report);
            if (st != MG_OK)
                throw Failure{exit_code(st), std::string(mono ? "monodromy" : "classify") + ": " + error};
            if (mono) {
                if (result)
                    std::cout << "returns after " << result << " loop(s)\n";
                else
                    std::cout << "no return within " << max_loops << " loop(s)\n";
            } else {
                static const char *kinds[] = {"Removable", "PoleLike", "BranchLike", "Logarithmic", "Undetermined"};
                std::cout << "classification " << kinds[result] << "\n";
            }
            std::cout << "wrote " << file << "\n";
            return exit_ok;
        }

        if (coercive->parsed()) {
            run.begin("coercive");
            run.put("spec", spec_file);
            mg_esempio *e = nullptr;
            check(mg_esempio_load(spec_file.c_str(), &e), spec_file);
            EsempioPtr owned(e);
            char *text = nullptr, *record = nullptr;
            mg_verdict verdict{};
            check(mg_coercive(e, MG_FORMAT_TEXT, run.config.get(), &text, &verdict), "coercive");
            const auto text_file = run.write("certificate.txt", text);
            check(mg_coercive(e, run.mg(), run.config.get(), &record, &verdict), "coercive");
            const auto record_file = run.write("certificate" + run.ext(), record);
            std::cout << "verdict " << (verdict == MG_COERCIVE ? "Coercive" : "NotCertified") << "\nwrote "
                      << text_file << "\nwrote " << record_file << "\n";
            return exit_ok;
        }

        if (probe->parsed()) {
            const auto u = complex_list(u0, "u0");
            const auto v = complex_list(udot0, "udot0");
            if (u.size() != v.size())
                throw Failure{exit_input, "--u0 and --udot0 differ in length"};
            mg_complex origin{};
            check(mg_parse_complex(z0.c_str(), &origin), "--z0");
            run.begin("probe");
            run.put("metric", metric_file);
            run.put("rays", static_cast<long long>(rays));
            run.put("radius", radius);
            run.put("z0", fmt(origin));
            run.put("u0", render_list(u));
            run.put("udot0", render_list(v));
            run.put("budget", static_cast<long long>(budget));
            auto m = load_metric(metric_file);
            char *report = nullptr;
            std::size_t witnesses = 0;
            int exceeded = 0;
            check(mg_probe(m.get(), origin, u.data(), v.data(), u.size(), rays, radius, run.tol, budget, run.mg(),
                           run.config.get(), &report, &witnesses, &exceeded),
                  "probe");
            const auto file = run.write("probe" + run.ext(), report);
            std::cout << "witnesses " << witnesses << "\nwrote " << file << "\n";
            if (witnesses)
                return exit_witness;
            if (exceeded) {
                std::cerr << "merogeo: probe: step budget exhausted\n";
                return exit_numeric;
            }
            return exit_ok;
        }

        if (quadcheck->parsed()) {
            const auto abc = complex_list(coefficients, "coefficients");
            if (abc.size() != 3)
                throw Failure{exit_input, "quadcheck expects three coefficients a,b,c"};
            run.begin("quadcheck");
            run.put("coefficients", render_list(abc));
            run.put("points", static_cast<long long>(points));
            char *report = nullptr;
            double err = 0.0;
            check(mg_quadcheck(abc[0], abc[1], abc[2], points, run.seed, run.mg(), run.config.get(), &report, &err),
                  "quadcheck");
            const auto file = run.write("quadcheck" + run.ext(), report);
            std::cout << "max derivative error " << fmt(err) << "\nwrote " << file << "\n";
            return exit_ok;
        }
    } catch (const Failure &f) {
        std::cerr << "merogeo: " << f.message << "\n";
        return f.code;
    }
    return exit_ok;
}
