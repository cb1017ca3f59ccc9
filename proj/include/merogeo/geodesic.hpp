#pragma once

#include <vector>

#include "merogeo/continuation.hpp"
#include "merogeo/metric.hpp"

namespace merogeo {

struct GeodesicState {
    cplx z{};
    std::vector<cplx> u;
    std::vector<cplx> udot;
};

// Packed ODE state (u1..uN, udot1..udotN) and back.
State pack(const GeodesicState &s);
GeodesicState unpack(cplx z, std::span<const cplx> y);

enum class IntegralCase { General, ConstantU1 };
const char *to_string(IntegralCase c);

// General case: A_k = (udot_k)^2 f_k a_k^2 for k >= 2 and
// A_1 = (udot_1)^2 b1 + sum_l A_l / a_l (the speed).
// ConstantU1 case (|udot_1| < degen_eps): A_1 = u_1 and A_k = (udot_k)^2 f_k.
struct FirstIntegrals {
    IntegralCase kind = IntegralCase::General;
    std::vector<cplx> A; // A[0] is A_1
};

// Second-order geodesic system as a first-order system of dimension 2N.
// Signals Pole where b1, a_k or f_k has a pole or vanishes.
OdeSystem geodesic_rhs(const MetricSpec &m, const MetricThresholds &th = {});

// Throws NotOrdinary or PoleError.
FirstIntegrals first_integrals(const MetricSpec &m, const GeodesicState &s0, const MetricThresholds &th = {});

// |LHS - RHS| of each conservation law at s; throws PoleError.
std::vector<double> first_integral_residual(const MetricSpec &m, const GeodesicState &s, const FirstIntegrals &F,
                                            const MetricThresholds &th = {});

struct TraceOptions {
    IntegrateOptions integrate{};
    MetricThresholds thresholds{};
    // Run classify_singularity on a SingularStop.
    bool classify = true;
    ClassifyOptions classify_options{};
    // Arclength backed off from the stop point to start the classification
    // approach; 0 selects min(0.5, half the arclength travelled).
    double classify_backoff = 0.0;
};

struct GeodesicTrace {
    explicit GeodesicTrace(PathSpec p) : path(std::move(p)) {}

    PathSpec path;
    std::size_t dimension = 0;
    TraceRecord record;
    FirstIntegrals integrals;
    // Per sample: N residuals (NaN where a coefficient has a pole) and the speed.
    std::vector<std::vector<double>> residuals;
    std::vector<cplx> speeds;

    GeodesicState state(std::size_t sample) const { return unpack(record.samples.at(sample).z, record.samples.at(sample).y); }
    double max_residual() const;
    // max |speed - speed at start|
    double speed_drift() const;
};

// Integrates the geodesic system with initial data s0 along `path`, which must
// start at s0.z. Coordinates in UnitDisc factors are monitored and a crossing
// of the unit circle ends the trace with DomainExit.
GeodesicTrace trace_geodesic(const MetricSpec &m, const GeodesicState &s0, const PathSpec &path, double tol,
                             const TraceOptions &opts = {});

// With v = u_N as independent variable, gamma_k(v) = u_k for k < N satisfies
//   gamma_k'' = gamma_k' S^N - S^k,  S^k = sum_ij Gamma^k_ij xi^i xi^j,
// xi = (gamma_1', ..., gamma_{N-1}', 1). State (gamma, gamma') of size 2(N-1).
OdeSystem reparametrized_rhs(const MetricSpec &m, const MetricThresholds &th = {});

// Initial state for reparametrized_rhs at v = s0.u_N; throws VanishingUN.
State reparametrized_initial_state(const MetricSpec &m, const GeodesicState &s0, const MetricThresholds &th = {});

// Induced covariant derivative dX/dz + Gamma^k_ij (du_i/dz) X^j at every sample
// of a trace recorded on a uniform grid (samples_per_leg >= 4). X holds one
// N-vector per sample. Throws NotOrdinary.
std::vector<std::vector<cplx>> covariant_derivative_along(const MetricSpec &m, const GeodesicTrace &trace,
                                                          const std::vector<std::vector<cplx>> &X,
                                                          const MetricThresholds &th = {});

// d/dz of a sampled scalar along a gridded trace, same stencils as above.
std::vector<cplx> derivative_along(const TraceRecord &record, const PathSpec &path, const std::vector<cplx> &values);

} // namespace merogeo
