#include "merogeo/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <unistd.h>

namespace merogeo {

namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string &what)
{
    throw InputError("line " + std::to_string(line) + ": " + what);
}

struct Entry {
    std::string value;
    std::size_t line;
};

// key = value lines; '#' starts a comment.
std::map<std::string, Entry> key_values(std::string_view text)
{
    std::map<std::string, Entry> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos)
            nl = text.size();
        auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            fail(line_no, "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty() || value.empty())
            fail(line_no, "empty key or value");
        if (!out.emplace(key, Entry{value, line_no}).second)
            fail(line_no, "duplicate key '" + key + "'");
        if (pos > text.size())
            break;
    }
    return out;
}

std::size_t parse_count(const Entry &e, const char *what)
{
    std::size_t used = 0;
    long n = 0;
    try {
        n = std::stol(e.value, &used);
    } catch (const std::exception &) {
        fail(e.line, std::string("expected an integer for ") + what);
    }
    if (used != e.value.size() || n < 1 || n > 64)
        fail(e.line, std::string("expected an integer in [1, 64] for ") + what);
    return static_cast<std::size_t>(n);
}

Expr parse_entry(const Entry &e, const VariableNames &names = default_variables())
{
    try {
        return parse(e.value, names);
    } catch (const SyntaxError &err) {
        fail(e.line, err.what());
    } catch (const ExponentNotInteger &err) {
        fail(e.line, err.what());
    }
}

const Entry &require(const std::map<std::string, Entry> &kv, const std::string &key)
{
    auto it = kv.find(key);
    if (it == kv.end())
        throw InputError("missing key '" + key + "'");
    return it->second;
}

std::vector<FactorDomain> parse_domains(const std::map<std::string, Entry> &kv, std::size_t n)
{
    std::vector<FactorDomain> d(n, FactorDomain::Plane);
    for (std::size_t i = 1; i <= n; ++i) {
        auto it = kv.find("domain." + std::to_string(i));
        if (it == kv.end())
            continue;
        if (it->second.value == "plane")
            d[i - 1] = FactorDomain::Plane;
        else if (it->second.value == "disc")
            d[i - 1] = FactorDomain::UnitDisc;
        else
            fail(it->second.line, "domain must be 'plane' or 'disc'");
    }
    return d;
}

void reject_unknown(const std::map<std::string, Entry> &kv, const std::vector<std::string> &known)
{
    for (const auto &[k, e] : kv)
        if (std::find(known.begin(), known.end(), k) == known.end())
            fail(e.line, "unknown key '" + k + "'");
}

std::string format_complex(cplx z)
{
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
    return buf;
}

} // namespace

cplx parse_complex(std::string_view text)
{
    static const VariableNames none;
    Expr e;
    try {
        e = parse(trim(text), none);
    } catch (const Error &err) {
        throw InputError("bad complex literal '" + std::string(text) + "': " + err.what());
    }
    const auto v = eval(e, std::span<const cplx>{});
    if (v.infinite || !std::isfinite(std::abs(v.value)))
        throw InputError("complex literal '" + std::string(text) + "' is not finite");
    return v.value;
}

std::vector<cplx> parse_complex_list(std::string_view text)
{
    std::vector<cplx> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = text.find(',', pos);
        out.push_back(parse_complex(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos)));
        if (comma == std::string_view::npos)
            break;
        pos = comma + 1;
    }
    return out;
}

double parse_angle(std::string_view text)
{
    static const VariableNames pi_name{"pi"};
    Expr e;
    try {
        e = parse(trim(text), pi_name);
    } catch (const Error &err) {
        throw InputError("bad angle '" + std::string(text) + "': " + err.what());
    }
    const auto v = eval(e, cplx(std::numbers::pi));
    if (v.infinite || v.value.imag() != 0.0 || !std::isfinite(v.value.real()))
        throw InputError("angle '" + std::string(text) + "' is not a finite real number");
    return v.value.real();
}

MetricSpec parse_metric(std::string_view text)
{
    const auto kv = key_values(text);
    const auto n = parse_count(require(kv, "N"), "N");
    if (n < 2)
        fail(require(kv, "N").line, "N must be at least 2");
    std::vector<std::string> known{"N", "b1"};
    std::vector<Expr> a, f;
    for (std::size_t k = 2; k <= n; ++k) {
        const auto ks = std::to_string(k);
        a.push_back(parse_entry(require(kv, "a." + ks)));
        f.push_back(parse_entry(require(kv, "f." + ks)));
        known.push_back("a." + ks);
        known.push_back("f." + ks);
    }
    for (std::size_t i = 1; i <= n; ++i)
        known.push_back("domain." + std::to_string(i));
    reject_unknown(kv, known);
    try {
        return MetricSpec(parse_domains(kv, n), parse_entry(require(kv, "b1")), a, f);
    } catch (const InvalidArgument &e) {
        throw InputError(e.what());
    }
}

PathSpec parse_path(std::string_view text)
{
    std::vector<Leg> legs;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.resize(hash);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;)
            tok.push_back(t);
        if (tok.empty())
            continue;
        try {
            if (tok[0] == "seg" && tok.size() == 3) {
                legs.push_back(Segment{parse_complex(tok[1]), parse_complex(tok[2])});
            } else if (tok[0] == "arc" && tok.size() == 5) {
                const cplx r = parse_complex(tok[2]);
                if (r.imag() != 0.0 || !(r.real() > 0.0))
                    fail(line_no, "arc radius must be a positive real number");
                legs.push_back(Arc{parse_complex(tok[1]), r.real(), parse_angle(tok[3]), parse_angle(tok[4])});
            } else {
                fail(line_no, "expected 'seg <z1> <z2>' or 'arc <center> <radius> <angle_from> <angle_to>'");
            }
        } catch (const InputError &e) {
            const std::string msg = e.what();
            if (msg.rfind("line ", 0) == 0)
                throw;
            fail(line_no, msg);
        }
    }
    if (legs.empty())
        throw InputError("path has no legs");
    try {
        return PathSpec(std::move(legs));
    } catch (const InvalidArgument &e) {
        throw InputError(e.what());
    }
}

EsempioSpec parse_esempio(std::string_view text)
{
    const auto kv = key_values(text);
    const auto n = parse_count(require(kv, "N"), "N");
    if (n < 2)
        fail(require(kv, "N").line, "N must be at least 2");
    EsempioSpec s;
    std::vector<std::string> known{"N", "h"};
    s.h = parse_entry(require(kv, "h"));
    for (std::size_t k = 2; k <= n; ++k) {
        const auto ks = std::to_string(k);
        s.f.push_back(parse_entry(require(kv, "f." + ks)));
        const auto &pe = require(kv, "P." + ks);
        try {
            s.P.push_back(parse_complex_list(pe.value));
        } catch (const InputError &e) {
            fail(pe.line, e.what());
        }
        known.push_back("f." + ks);
        known.push_back("P." + ks);
    }
    bool any_domain = false;
    for (std::size_t i = 1; i <= n; ++i) {
        known.push_back("domain." + std::to_string(i));
        any_domain = any_domain || kv.count("domain." + std::to_string(i));
    }
    reject_unknown(kv, known);
    if (any_domain)
        s.domains = parse_domains(kv, n);
    return s;
}

OdeSystem OdeSpec::system(const EvalOptions &opts) const
{
    const auto d = dimension;
    const auto exprs = rhs;
    const bool alias = d == 1;
    return OdeSystem(d, [exprs, d, alias, opts](cplx z, std::span<const cplx> y, std::span<cplx> dy) {
        std::vector<cplx> vars;
        vars.reserve(d + 2);
        vars.push_back(z);
        vars.insert(vars.end(), y.begin(), y.end());
        if (alias)
            vars.push_back(y[0]);
        for (std::size_t k = 0; k < d; ++k) {
            const auto v = eval(exprs[k], vars, opts);
            if (v.infinite || !std::isfinite(std::abs(v.value)))
                return RhsStatus::Pole;
            dy[k] = v.value;
        }
        return RhsStatus::Ok;
    });
}

OdeSpec parse_ode(std::string_view text)
{
    const auto kv = key_values(text);
    OdeSpec s;
    s.dimension = parse_count(require(kv, "dim"), "dim");
    s.names.push_back("z");
    for (std::size_t k = 1; k <= s.dimension; ++k)
        s.names.push_back("y" + std::to_string(k));
    if (s.dimension == 1)
        s.names.push_back("y");
    std::vector<std::string> known{"dim"};
    for (std::size_t k = 1; k <= s.dimension; ++k) {
        known.push_back("rhs." + std::to_string(k));
        s.rhs.push_back(parse_entry(require(kv, "rhs." + std::to_string(k)), s.names));
    }
    reject_unknown(kv, known);
    return s;
}

std::string render_metric(const MetricSpec &m)
{
    std::string out = "N = " + std::to_string(m.dimension()) + "\n";
    for (std::size_t i = 1; i <= m.dimension(); ++i)
        out += "domain." + std::to_string(i) + " = "
               + (m.domains()[i - 1] == FactorDomain::UnitDisc ? "disc" : "plane") + "\n";
    out += "b1 = " + render(m.b1()) + "\n";
    for (std::size_t k = 2; k <= m.dimension(); ++k) {
        out += "a." + std::to_string(k) + " = " + render(m.a(k)) + "\n";
        out += "f." + std::to_string(k) + " = " + render(m.f(k)) + "\n";
    }
    return out;
}

std::string render_path(const PathSpec &p)
{
    std::string out;
    for (const auto &leg : p.legs()) {
        if (const auto *s = std::get_if<Segment>(&leg)) {
            out += "seg " + format_complex(s->from) + " " + format_complex(s->to) + "\n";
        } else {
            const auto &a = std::get<Arc>(leg);
            out += "arc " + format_complex(a.center) + " " + format_double(a.radius) + " "
                   + format_double(a.angle_from) + " " + format_double(a.angle_to) + "\n";
        }
    }
    return out;
}

std::string read_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::string &path, std::string_view data)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot write '" + tmp.string() + "'");
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        out.flush();
        if (!out)
            throw IoError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move output into place at '" + path + "'");
    }
}

// ---------------------------------------------------------------------------

std::string format_double(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string json_escape(std::string_view s)
{
    std::string out = "\"";
    for (char ch : s) {
        const auto c = static_cast<unsigned char>(ch);
        switch (ch) {
        case '"':
            out += "\\\"";
            break;
        case '\\':
            out += "\\\\";
            break;
        case '\n':
            out += "\\n";
            break;
        case '\t':
            out += "\\t";
            break;
        case '\r':
            out += "\\r";
            break;
        default:
            if (c < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += ch;
            }
        }
    }
    return out + "\"";
}

void JsonWriter::separate()
{
    if (after_key_) {
        after_key_ = false;
        return;
    }
    if (!first_.empty()) {
        if (first_.back())
            first_.back() = false;
        else
            out_ += ",";
    }
}

JsonWriter &JsonWriter::begin_object()
{
    separate();
    out_ += "{";
    first_.push_back(true);
    return *this;
}

JsonWriter &JsonWriter::end_object()
{
    out_ += "}";
    first_.pop_back();
    return *this;
}

JsonWriter &JsonWriter::begin_array()
{
    separate();
    out_ += "[";
    first_.push_back(true);
    return *this;
}

JsonWriter &JsonWriter::end_array()
{
    out_ += "]";
    first_.pop_back();
    return *this;
}

JsonWriter &JsonWriter::key(std::string_view k)
{
    separate();
    out_ += json_escape(k) + ":";
    after_key_ = true;
    return *this;
}

JsonWriter &JsonWriter::value(std::string_view s)
{
    separate();
    out_ += json_escape(s);
    return *this;
}

JsonWriter &JsonWriter::value(double x)
{
    separate();
    out_ += std::isfinite(x) ? format_double(x) : "null";
    return *this;
}

JsonWriter &JsonWriter::value(long long x)
{
    separate();
    out_ += std::to_string(x);
    return *this;
}

JsonWriter &JsonWriter::value(bool b)
{
    separate();
    out_ += b ? "true" : "false";
    return *this;
}

JsonWriter &JsonWriter::null()
{
    separate();
    out_ += "null";
    return *this;
}

JsonWriter &JsonWriter::value(cplx z)
{
    begin_object();
    key("re").value(z.real());
    key("im").value(z.imag());
    return end_object();
}

JsonWriter &JsonWriter::config(const Config &c)
{
    begin_object();
    for (const auto &[k, v] : c) {
        key(k);
        std::visit([this](const auto &x) { value(x); }, v.value);
    }
    return end_object();
}

std::string config_json(const Config &c)
{
    JsonWriter w;
    w.config(c);
    auto s = w.str();
    s.pop_back();
    return s;
}

} // namespace merogeo
