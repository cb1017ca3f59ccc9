#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "merogeo/coercivity.hpp"
#include "merogeo/continuation.hpp"
#include "merogeo/metric.hpp"
#include "merogeo/path.hpp"

namespace merogeo {

// Complex literal in expression syntax without variables: "1.5", "-2i", "0.3-4e-2i", "(1+i)/2".
cplx parse_complex(std::string_view text);
// Comma-separated complex literals.
std::vector<cplx> parse_complex_list(std::string_view text);
// Real number that may use the name `pi`: "3.5", "-pi/2", "2*pi".
double parse_angle(std::string_view text);

// Text formats. All throw InputError with a line number on malformed input.
//
// metric:   N = 2 / domain.1 = plane|disc / b1 = ... / a.2 = ... / f.2 = ...
// path:     seg <z1> <z2>   or   arc <center> <radius> <angle_from> <angle_to>
// esempio:  N = 2 / h = ... / f.2 = ... / P.2 = c0, c1, c2 / domain.i optional
// ode:      dim = d / rhs.1 = ... in the variables z, y1..yd (y when d = 1)
MetricSpec parse_metric(std::string_view text);
PathSpec parse_path(std::string_view text);
EsempioSpec parse_esempio(std::string_view text);

struct OdeSpec {
    std::size_t dimension = 0;
    std::vector<Expr> rhs;
    VariableNames names;
    OdeSystem system(const EvalOptions &opts = {}) const;
};
OdeSpec parse_ode(std::string_view text);

std::string render_metric(const MetricSpec &m);
std::string render_path(const PathSpec &p);

std::string read_file(const std::string &path);
// Writes to a temporary file in the same directory and renames it into place.
void write_file_atomic(const std::string &path, std::string_view data);

// ---------------------------------------------------------------------------
// Deterministic output helpers.

// %.17g, with "nan"/"inf" spelled as JSON-incompatible tokens replaced by null in JSON.
std::string format_double(double x);

// Ordered key/value configuration echoed into every output file.
struct ConfigValue {
    std::variant<std::string, double, long long, bool> value;
};
using Config = std::vector<std::pair<std::string, ConfigValue>>;

// Minimal streaming JSON writer with fixed field order and 17-digit floats.
class JsonWriter {
public:
    JsonWriter &begin_object();
    JsonWriter &end_object();
    JsonWriter &begin_array();
    JsonWriter &end_array();
    JsonWriter &key(std::string_view k);
    JsonWriter &value(std::string_view s);
    JsonWriter &value(const char *s) { return value(std::string_view(s)); }
    JsonWriter &value(double x);
    JsonWriter &value(long long x);
    JsonWriter &value(int x) { return value(static_cast<long long>(x)); }
    JsonWriter &value(std::size_t x) { return value(static_cast<long long>(x)); }
    JsonWriter &value(bool b);
    JsonWriter &null();
    // {"re": .., "im": ..}
    JsonWriter &value(cplx z);
    JsonWriter &config(const Config &c);
    std::string str() const { return out_ + "\n"; }

private:
    void separate();
    std::string out_;
    std::vector<bool> first_;
    bool after_key_ = false;
};

std::string json_escape(std::string_view s);
std::string config_json(const Config &c);

} // namespace merogeo
