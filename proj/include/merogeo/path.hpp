#pragma once

#include <variant>
#include <vector>

#include "merogeo/error.hpp"

namespace merogeo {

struct Segment {
    cplx from;
    cplx to;
};

// Points center + radius * exp(i*theta) for theta from angle_from to angle_to
// (either orientation; may wind more than once).
struct Arc {
    cplx center;
    double radius;
    double angle_from;
    double angle_to;
};

using Leg = std::variant<Segment, Arc>;

cplx leg_start(const Leg &leg);
cplx leg_end(const Leg &leg);
double leg_length(const Leg &leg);

// Piecewise path in the base plane parametrized by t in [0, 1]
// proportionally to arclength.
class PathSpec {
public:
    explicit PathSpec(std::vector<Leg> legs);

    static PathSpec segment(cplx from, cplx to);
    // Full counterclockwise circle about `center` starting and ending at `start`.
    static PathSpec circle(cplx center, cplx start, int turns = 1);
    // Polyline through the given points.
    static PathSpec polyline(const std::vector<cplx> &points);

    const std::vector<Leg> &legs() const { return legs_; }
    double arclength() const { return total_; }
    cplx start() const { return leg_start(legs_.front()); }
    cplx end() const { return leg_end(legs_.back()); }
    bool is_closed(double tol = 1e-12) const;

    // Global parameter at which leg i starts; leg_t(legs().size()) == 1.
    double leg_t(std::size_t i) const { return breaks_.at(i); }
    // Leg containing t; at an interior break, the leg that starts there.
    std::size_t leg_index(double t) const;

    cplx point(double t) const;
    // dz/dt on leg `leg` (constant speed equal to the total arclength).
    cplx tangent(double t, std::size_t leg) const;
    cplx point_on_leg(double t, std::size_t leg) const;

    PathSpec reversed() const;
    // The portion between parameters t0 < t1, reparametrized to [0, 1].
    PathSpec subpath(double t0, double t1) const;
    PathSpec then(const PathSpec &next) const;

private:
    std::vector<Leg> legs_;
    std::vector<double> breaks_;
    double total_ = 0.0;
};

} // namespace merogeo
