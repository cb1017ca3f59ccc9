#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "merogeo/expr.hpp"
#include "merogeo/path.hpp"

namespace merogeo {

using State = std::vector<cplx>;

enum class RhsStatus { Ok, Pole };

// dy/dz = rhs(z, y). The callable must be deterministic and side-effect free.
class OdeSystem {
public:
    using Rhs = std::function<RhsStatus(cplx z, std::span<const cplx> y, std::span<cplx> dydz)>;

    OdeSystem(std::size_t dimension, Rhs rhs);

    std::size_t dimension() const { return dim_; }
    RhsStatus operator()(cplx z, std::span<const cplx> y, std::span<cplx> dydz) const { return rhs_(z, y, dydz); }

private:
    std::size_t dim_;
    Rhs rhs_;
};

enum class SingularityKind { Removable, PoleLike, BranchLike, Logarithmic, Undetermined };

struct SingularityClass {
    SingularityKind kind = SingularityKind::Undetermined;
    int order = 0;  // PoleLike: >= 1
    int sheets = 0; // BranchLike: >= 2
    // Diagnostics.
    double fit_slope = 0.0;
    double fit_residual = 0.0;
    std::string note;

    static SingularityClass of(SingularityKind kind, int order = 0, int sheets = 0)
    {
        SingularityClass c;
        c.kind = kind;
        c.order = order;
        c.sheets = sheets;
        return c;
    }
    static SingularityClass removable() { return of(SingularityKind::Removable); }
    static SingularityClass pole_like(int order) { return of(SingularityKind::PoleLike, order); }
    static SingularityClass branch_like(int sheets) { return of(SingularityKind::BranchLike, 0, sheets); }
    static SingularityClass logarithmic() { return of(SingularityKind::Logarithmic); }
    static SingularityClass undetermined(std::string why = {})
    {
        SingularityClass c;
        c.note = std::move(why);
        return c;
    }
};

const char *to_string(SingularityKind kind);

enum class TerminalKind { Completed, SingularStop, DomainExit };
enum class StopCause { None, Pole, StepUnderflow, NonFinite, StepBudget };

const char *to_string(TerminalKind kind);
const char *to_string(StopCause cause);

struct Terminal {
    TerminalKind kind = TerminalKind::Completed;
    StopCause cause = StopCause::None;
    double t = 1.0;
    cplx z{};
    SingularityClass singularity{};
};

struct Sample {
    double t;
    cplx z;
    State y;
    std::size_t leg;
};

struct StepStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evaluations = 0;
    // Arclength units.
    double min_step = std::numeric_limits<double>::infinity();
    double max_step = 0.0;
};

struct TraceRecord {
    std::vector<Sample> samples;
    StepStats stats;
    Terminal terminal;

    const State &final_state() const { return samples.back().y; }
};

struct IntegrateOptions {
    // Smallest step as a fraction of the path arclength.
    double min_step = 1e-13;
    double initial_step = 1e-2;
    // 0 records every accepted step; otherwise each leg is sampled on a
    // uniform grid of this many intervals (steps land on the grid).
    std::size_t samples_per_leg = 0;
    std::size_t max_steps = 5'000'000;
    // Optional region monitor: negative inside. A sign change ends the
    // integration with DomainExit at the located crossing.
    std::function<double(std::span<const cplx>)> boundary;
};

// Adaptive Dormand-Prince 5(4) continuation along the path, advanced in the
// real path parameter with the dz/dt chain factor. Local error per step is
// kept below tol * max(1, |y|) componentwise.
TraceRecord integrate_along(const OdeSystem &sys, const State &y0, const PathSpec &path, double tol,
                            const IntegrateOptions &opts = {});

// ---------------------------------------------------------------------------

struct MonodromyOptions {
    // Integration tolerance; 0 selects max(tol * 1e-3, 1e-14).
    double integration_tol = 0.0;
};

struct MonodromyResult {
    bool returned = false;
    // Loop count at which the state first returned, or loops completed.
    int loops = 0;
    // Per-loop displacement y_k - y_{k-1}.
    std::vector<State> displacements;
    std::vector<State> endpoints;
    bool stopped = false;
    Terminal stop{};
};

MonodromyResult monodromy_probe(const OdeSystem &sys, const State &y0, const PathSpec &loop, int max_loops,
                                double tol, const MonodromyOptions &opts = {});

// ---------------------------------------------------------------------------

// Chordal distance on the Riemann sphere: 2|x-y| / sqrt((1+|x|^2)(1+|y|^2)).
double chordal_distance(const ExtComplex &x, const ExtComplex &y);

struct LimitOptions {
    double shrink = 0.5;
    // First sample at this fraction of the ray's arclength from its end.
    double first_fraction = 0.5;
    int max_samples = 48;
    double chordal_tol = 1e-6;
    int window = 6;
    double oscillation_floor = 1e-2;
    // Sampling stops at this fraction of the ray's arclength from its end.
    double min_fraction = 1e-11;
    double tol = 1e-10;
};

enum class LimitKind { Converged, NoLimit, Stopped };

struct LimitSample {
    double distance; // remaining arclength to the ray's end
    cplx z;
    State y;
};

struct LimitResult {
    LimitKind kind = LimitKind::NoLimit;
    std::vector<ExtComplex> value; // per component, when Converged
    std::vector<LimitSample> samples;
    std::vector<double> chordal_steps;
    Terminal stop{};

    bool converged_to_infinity() const;
};

LimitResult radial_limit(const OdeSystem &sys, const State &y0, const PathSpec &ray, const LimitOptions &opts = {});

// ---------------------------------------------------------------------------

struct ClassifyOptions {
    double tol = 1e-10;
    int max_loops = 8;
    // 0 selects half the distance from the approach start to the center.
    double loop_radius = 0.0;
    int fit_samples = 8;
    double fit_residual_max = 0.05;
    double log_variation = 0.05;
    LimitOptions limit{};
};

// Decision procedure over monodromy on two shrinking loops and the radial
// limit along the approach.
SingularityClass classify_singularity(const OdeSystem &sys, const State &y0, cplx center, const PathSpec &approach,
                                      const ClassifyOptions &opts = {});

// Least-squares slope of log|y| against log(distance) over the last `count`
// samples of the component with the slowest divergence; residual is RMS.
struct GrowthFit {
    double slope = 0.0;
    double residual = 0.0;
    bool ok = false;
};
GrowthFit fit_growth(const LimitResult &limit, int count);

} // namespace merogeo
