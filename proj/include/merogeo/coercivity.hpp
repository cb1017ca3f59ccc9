#pragma once

#include <optional>
#include <string>
#include <vector>

#include "merogeo/geodesic.hpp"
#include "merogeo/quad.hpp"

namespace merogeo {

// Metrics of the form
//   (h'(u1))^2 du1^2 + sum_k f_k(u_k)^2 / P_k(h(u1)) du_k^2
// with P_k of degree at most two. f[0] and P[0] belong to factor 2.
struct EsempioSpec {
    std::vector<FactorDomain> domains; // empty means every factor in the plane
    Expr h;
    std::vector<Expr> f;
    std::vector<std::vector<cplx>> P; // ascending coefficients; degree checked by the certifier

    std::size_t dimension() const { return f.size() + 1; }
    // Throws InvalidArgument when the data are inconsistent.
    MetricSpec to_metric() const;
};

// Polynomial with ascending complex coefficients, trailing zeros trimmed.
struct Polynomial {
    std::vector<cplx> c;
    int degree() const { return static_cast<int>(c.size()) - 1; } // -1 for the zero polynomial
    bool is_zero() const { return c.empty(); }
};

struct RationalFunction {
    Polynomial num;
    Polynomial den;
};

// Exact-arithmetic conversion of an expression in one variable; nullopt when the
// expression is not rational (exp of a nonconstant argument) or divides by zero.
std::optional<RationalFunction> to_rational(const Expr &e);

// Nonconstant as a function: num' den - num den' is not identically zero.
bool is_nonconstant(const RationalFunction &r);

enum class Verdict { Coercive, NotCertified };
const char *to_string(Verdict v);

struct CertificateCondition {
    std::string name;
    bool satisfied = false;
    std::string detail;
};

struct Certificate {
    Verdict verdict = Verdict::NotCertified;
    std::vector<CertificateCondition> conditions;
    std::vector<std::string> notes;
};

// Deterministic; the result does not depend on which ordinary point is used to
// confirm that the metric is nondegenerate somewhere.
Certificate check_esempio_coercive(const EsempioSpec &s);

// ---------------------------------------------------------------------------

struct ProbeOptions {
    int rays = 32;
    double radius = 50.0;
    double tol = 1e-10;
    // Total integration steps over every trace of the probe.
    std::size_t budget = 20'000'000;
    int max_restarts = 8;
    // Detour radius around a stop, capped by half the distance travelled.
    double detour_radius = 0.25;
    ClassifyOptions classify{};
    MetricThresholds thresholds{};
};

enum class RayStatus { Completed, SoftStop, Witness, Budget };
const char *to_string(RayStatus s);

struct ProbeStop {
    cplx z{};
    TerminalKind kind = TerminalKind::SingularStop;
    StopCause cause = StopCause::None;
    SingularityClass singularity{};
    bool restarted = false;
};

struct RayOutcome {
    std::size_t seed = 0;
    int ray = 0;
    double angle = 0.0;
    RayStatus status = RayStatus::Completed;
    std::vector<ProbeStop> stops;
    std::size_t steps = 0;
};

struct Witness {
    std::size_t seed = 0;
    int ray = 0;
    double angle = 0.0;
    cplx direction{};
    cplx z_star{};
    TerminalKind kind = TerminalKind::SingularStop;
    SingularityClass singularity{};
};

struct ProbeResult {
    std::vector<Witness> witnesses;
    std::vector<RayOutcome> rays;
    bool budget_exceeded = false;
    std::size_t steps = 0;
};

// Traces every seed along a fan of rays z0 + t R exp(i angle). DomainExit and
// stops that are neither branch-like nor logarithmic and cannot be bypassed by
// a semicircular detour are reported as witnesses.
ProbeResult incompleteness_probe(const MetricSpec &m, const std::vector<GeodesicState> &seeds,
                                 const ProbeOptions &opts = {});

} // namespace merogeo
