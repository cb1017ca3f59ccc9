#pragma once

#include <string>

#include "merogeo/coercivity.hpp"
#include "merogeo/io.hpp"

namespace merogeo {

enum class Format { Csv, Json, Text };

const char *version();

// Every renderer embeds the tool version and `config`. CSV output carries
// them as leading '#' comment lines.

std::string render_trace(const GeodesicTrace &trace, Format fmt, const Config &config);

std::string render_christoffel(const ChristoffelTable &warped, const ChristoffelTable &generic,
                               std::span<const cplx> u, Format fmt, const Config &config);

std::string render_monodromy(const MonodromyResult &res, Format fmt, const Config &config);

std::string render_classification(const SingularityClass &cls, cplx center, Format fmt, const Config &config);

// Text is the human-readable report.
std::string render_certificate(const Certificate &cert, Format fmt, const Config &config);

std::string render_probe(const ProbeResult &res, Format fmt, const Config &config);

std::string render_quadcheck(const std::vector<QuadSelfTest> &tests, Format fmt, const Config &config);

} // namespace merogeo
