#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <random>

#include "json.hpp"
#include "merogeo/report.hpp"

using namespace merogeo;
using namespace std::complex_literals;
using nlohmann::json;

namespace {

std::string error_of(auto &&f)
{
    try {
        f();
    } catch (const InputError &e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("complex literals and angles")
{
    CHECK(parse_complex("1.5") == cplx(1.5));
    CHECK(parse_complex("-2i") == cplx(0.0, -2.0));
    CHECK(parse_complex("0.3-4e-2i") == cplx(0.3, -0.04));
    CHECK(parse_complex("(1+i)/2") == cplx(0.5, 0.5));
    CHECK_THROWS_AS(parse_complex("u"), InputError);
    CHECK_THROWS_AS(parse_complex("1/0"), InputError);
    CHECK(parse_complex_list("0, 1+i,2") == std::vector<cplx>{0.0, 1.0 + 1.0i, 2.0});
    CHECK(parse_angle("-pi/2") == -std::numbers::pi / 2);
    CHECK(parse_angle("3.5") == 3.5);
    CHECK_THROWS_AS(parse_angle("i"), InputError);
}

TEST_CASE("metric files")
{
    const auto m = parse_metric("# a comment\nN = 3\ndomain.1 = disc\nb1 = 1 + u^2\na.2 = u\nf.2 = 1\n"
                                "a.3 = exp(u)\nf.3 = u^2 + 1  # trailing comment\n");
    CHECK(m.dimension() == 3);
    CHECK(m.domains()[0] == FactorDomain::UnitDisc);
    CHECK(m.domains()[2] == FactorDomain::Plane);
    CHECK(m.b1() == parse("1 + u^2"));
    CHECK(m.f(3) == parse("u^2+1"));

    const auto again = parse_metric(render_metric(m));
    CHECK(again.b1() == m.b1());
    CHECK(again.a(3) == m.a(3));
    CHECK(again.domains() == m.domains());

    CHECK(error_of([] { parse_metric("N = 2\nb1 = 1\na.2 = 1\n"); }).find("f.2") != std::string::npos);
    CHECK(error_of([] { parse_metric("N = 2\nb1 = 1\na.2 = 1\nf.2 = u+\n"); }).find("line 4") == 0);
    CHECK(error_of([] { parse_metric("N = 2\nN = 3\n"); }).find("line 2: duplicate") == 0);
    CHECK(error_of([] { parse_metric("N = 2\nb1 = 1\na.2 = 1\nf.2 = 1\nc = 1\n"); }).find("unknown key") !=
          std::string::npos);
    CHECK(error_of([] { parse_metric("N = 1\n"); }).find("at least 2") != std::string::npos);
    CHECK(error_of([] { parse_metric("N = 2\nb1 = 0\na.2 = 1\nf.2 = 1\n"); }).find("zero") != std::string::npos);
    CHECK(error_of([] { parse_metric("N = 2\ndomain.1 = ball\nb1 = 1\na.2 = 1\nf.2 = 1\n"); }).find("line 2") == 0);
    CHECK(error_of([] { parse_metric("N 2\n"); }).find("line 1") == 0);
}

TEST_CASE("path files")
{
    const auto p = parse_path("seg 0 1+1i\n# comment\narc 0 1.4142135623730951 pi/4 pi\n");
    CHECK(p.legs().size() == 2);
    CHECK(std::abs(p.end() - cplx(-1.4142135623730951, 0.0)) < 1e-15);

    const auto q = parse_path(render_path(p));
    CHECK(std::abs(q.arclength() - p.arclength()) < 1e-15);
    CHECK(std::abs(q.point(0.7) - p.point(0.7)) < 1e-15);

    CHECK(error_of([] { parse_path("seg 0\n"); }).find("line 1") == 0);
    CHECK(error_of([] { parse_path("seg 0 1\narc 0 -1 0 1\n"); }).find("line 2") == 0);
    CHECK(error_of([] { parse_path("seg 0 1\nseg 5 6\n"); }).find("legs") != std::string::npos);
    CHECK(error_of([] { parse_path("\n"); }).find("no legs") != std::string::npos);
}

TEST_CASE("example-class and ODE files")
{
    const auto s = parse_esempio("N = 2\nh = u\nf.2 = 1\nP.2 = 1, 0, 1\n");
    CHECK(s.dimension() == 2);
    CHECK(s.P[0] == std::vector<cplx>{1.0, 0.0, 1.0});
    CHECK(s.domains.empty());

    const auto o = parse_ode("dim = 1\nrhs.1 = y^2 + z*y1\n");
    CHECK(o.dimension == 1);
    const auto sys = o.system();
    std::vector<cplx> y{2.0}, dy(1);
    CHECK(sys(3.0, y, dy) == RhsStatus::Ok);
    CHECK(dy[0] == cplx(10.0));

    const auto o2 = parse_ode("dim = 2\nrhs.1 = y2\nrhs.2 = -y1/z\n");
    std::vector<cplx> y2{1.0, 0.0}, dy2(2);
    CHECK(o2.system()(0.0, y2, dy2) == RhsStatus::Pole);
    CHECK_THROWS_AS(parse_ode("dim = 1\nrhs.1 = y2\n"), InputError);
}

TEST_CASE("doubles print with 17 significant digits and round-trip")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-1e3, 1e3);
    for (int i = 0; i < 1000; ++i) {
        const double x = d(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
    }
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("json writer")
{
    JsonWriter w;
    w.begin_object();
    w.key("s").value("a\"b\\c\n");
    w.key("x").value(0.1);
    w.key("n").value(3);
    w.key("nan").value(std::nan(""));
    w.key("z").value(cplx(1.0, -2.0));
    w.key("list").begin_array().value(true).null().begin_array().end_array().end_array();
    w.key("config").config({{"b", ConfigValue{1e-10}}, {"a", ConfigValue{std::string("x")}}});
    w.end_object();
    const auto j = json::parse(w.str());
    CHECK(j["s"] == "a\"b\\c\n");
    CHECK(j["x"].get<double>() == 0.1);
    CHECK(j["nan"].is_null());
    CHECK(j["z"]["im"].get<double>() == -2.0);
    CHECK(j["list"].size() == 3);
    // Field order is preserved.
    CHECK(w.str().find("\"b\":1e-10,\"a\":\"x\"") != std::string::npos);
}

TEST_CASE("trace rendering")
{
    const auto m = MetricSpec::planar(parse("1 + u^2/10"), {parse("1")}, {parse("1")});
    const GeodesicState s0{0.0, {0.1, 0.0}, {1.0, 0.5}};
    const auto trace = trace_geodesic(m, s0, PathSpec::segment(0.0, 1.0 + 1.0i), 1e-10);
    const Config cfg{{"command", ConfigValue{std::string("trace")}}, {"tol", ConfigValue{1e-10}}};

    const auto csv = render_trace(trace, Format::Csv, cfg);
    CHECK(csv.rfind("# merogeo " + std::string(version()) + "\n# config {\"command\":\"trace\"", 0) == 0);
    CHECK(csv.find("\nt,re_z,im_z,re_u1,im_u1,re_udot1,im_udot1,re_u2,im_u2,re_udot2,im_udot2,residual_1,"
                   "residual_2,re_speed,im_speed\n") != std::string::npos);
    std::size_t rows = 0;
    for (std::size_t p = csv.find("\nt,"); (p = csv.find('\n', p + 1)) != std::string::npos && p + 1 < csv.size();)
        ++rows;
    CHECK(rows == trace.record.samples.size());

    const auto j = json::parse(render_trace(trace, Format::Json, cfg));
    CHECK(j["version"] == version());
    CHECK(j["config"]["tol"].get<double>() == 1e-10);
    CHECK(j["terminal"]["kind"] == "Completed");
    CHECK(j["samples"].size() == trace.record.samples.size());
    const auto &last = j["samples"].back();
    CHECK(last["re_z"].get<double>() == 1.0);
    CHECK(last["re_udot2"].get<double>() == trace.record.final_state()[3].real());

    // Identical inputs give identical bytes.
    const auto trace2 = trace_geodesic(m, s0, PathSpec::segment(0.0, 1.0 + 1.0i), 1e-10);
    CHECK(render_trace(trace2, Format::Csv, cfg) == csv);
}

TEST_CASE("certificate and probe rendering")
{
    EsempioSpec s;
    s.h = parse("u");
    s.f = {parse("1")};
    s.P = {{1.0, 0.0, 0.0, 2.0}};
    const auto cert = check_esempio_coercive(s);
    const auto text = render_certificate(cert, Format::Text, {});
    CHECK(text.find("verdict: NotCertified") != std::string::npos);
    CHECK(text.find("[FAILED] P_2 degree") != std::string::npos);
    const auto j = json::parse(render_certificate(cert, Format::Json, {}));
    CHECK(j["verdict"] == "NotCertified");
    CHECK(j["conditions"].size() == cert.conditions.size());

    ProbeOptions opts;
    opts.rays = 2;
    opts.radius = 2.0;
    MetricSpec disc({FactorDomain::UnitDisc, FactorDomain::Plane}, constant(1.0), {constant(1.0)}, {constant(1.0)});
    const auto res = incompleteness_probe(disc, {{0.0, {0.0, 0.0}, {0.6, 0.8}}}, opts);
    const auto pj = json::parse(render_probe(res, Format::Json, {}));
    CHECK(pj["witnesses"].size() == 2);
    CHECK(pj["witnesses"][0]["kind"] == "DomainExit");
    const auto pc = render_probe(res, Format::Csv, {});
    CHECK(pc.find("# witnesses 2\n") != std::string::npos);
    CHECK_THROWS_AS(render_probe(res, Format::Text, {}), InvalidArgument);
}

TEST_CASE("atomic writes")
{
    const auto dir = std::filesystem::temp_directory_path() / "merogeo_io_test";
    std::filesystem::create_directories(dir);
    const auto file = (dir / "out.txt").string();
    write_file_atomic(file, "first");
    write_file_atomic(file, "second");
    CHECK(read_file(file) == "second");
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto &e : std::filesystem::directory_iterator(dir))
        ++entries;
    CHECK(entries == 1);
    CHECK_THROWS_AS(write_file_atomic((dir / "missing" / "x.txt").string(), "x"), IoError);
    CHECK_THROWS_AS(read_file((dir / "missing.txt").string()), IoError);
    std::filesystem::remove_all(dir);
}
