#include "merogeo/path.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace merogeo {

namespace {

constexpr cplx I{0.0, 1.0};

cplx arc_point(const Arc &a, double theta) { return a.center + a.radius * std::exp(I * theta); }

// Leg restricted to local fractions [s0, s1] of its own length.
Leg leg_slice(const Leg &leg, double s0, double s1)
{
    if (const auto *s = std::get_if<Segment>(&leg)) {
        const auto d = s->to - s->from;
        return Segment{s->from + s0 * d, s->from + s1 * d};
    }
    const auto &a = std::get<Arc>(leg);
    const double span = a.angle_to - a.angle_from;
    return Arc{a.center, a.radius, a.angle_from + s0 * span, a.angle_from + s1 * span};
}

} // namespace

cplx leg_start(const Leg &leg)
{
    if (const auto *s = std::get_if<Segment>(&leg))
        return s->from;
    const auto &a = std::get<Arc>(leg);
    return arc_point(a, a.angle_from);
}

cplx leg_end(const Leg &leg)
{
    if (const auto *s = std::get_if<Segment>(&leg))
        return s->to;
    const auto &a = std::get<Arc>(leg);
    return arc_point(a, a.angle_to);
}

double leg_length(const Leg &leg)
{
    if (const auto *s = std::get_if<Segment>(&leg))
        return std::abs(s->to - s->from);
    const auto &a = std::get<Arc>(leg);
    return std::abs(a.radius) * std::abs(a.angle_to - a.angle_from);
}

PathSpec::PathSpec(std::vector<Leg> legs) : legs_(std::move(legs))
{
    if (legs_.empty())
        throw InvalidArgument("path needs at least one leg");
    for (std::size_t i = 0; i < legs_.size(); ++i) {
        if (const auto *a = std::get_if<Arc>(&legs_[i]); a && !(a->radius > 0.0))
            throw InvalidArgument("arc radius must be positive");
        const double len = leg_length(legs_[i]);
        if (!(len > 0.0) || !std::isfinite(len))
            throw InvalidArgument("path leg " + std::to_string(i + 1) + " has no length");
        if (i > 0) {
            const auto prev = leg_end(legs_[i - 1]);
            const auto next = leg_start(legs_[i]);
            if (std::abs(prev - next) > 1e-12 * (1.0 + std::abs(prev)))
                throw InvalidArgument("path legs " + std::to_string(i) + " and " + std::to_string(i + 1)
                                      + " are not contiguous");
        }
        total_ += len;
    }
    breaks_.reserve(legs_.size() + 1);
    double acc = 0.0;
    breaks_.push_back(0.0);
    for (std::size_t i = 0; i + 1 < legs_.size(); ++i) {
        acc += leg_length(legs_[i]);
        breaks_.push_back(acc / total_);
    }
    breaks_.push_back(1.0);
}

PathSpec PathSpec::segment(cplx from, cplx to) { return PathSpec({Segment{from, to}}); }

PathSpec PathSpec::circle(cplx center, cplx start, int turns)
{
    const double r = std::abs(start - center);
    const double theta = std::arg(start - center);
    return PathSpec({Arc{center, r, theta, theta + 2.0 * std::numbers::pi * turns}});
}

PathSpec PathSpec::polyline(const std::vector<cplx> &points)
{
    std::vector<Leg> legs;
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        if (points[i + 1] != points[i])
            legs.emplace_back(Segment{points[i], points[i + 1]});
    return PathSpec(std::move(legs));
}

bool PathSpec::is_closed(double tol) const { return std::abs(end() - start()) <= tol * (1.0 + std::abs(start())); }

std::size_t PathSpec::leg_index(double t) const
{
    const auto it = std::upper_bound(breaks_.begin() + 1, breaks_.end() - 1, t);
    return static_cast<std::size_t>(it - breaks_.begin()) - 1;
}

cplx PathSpec::point_on_leg(double t, std::size_t leg) const
{
    const double t0 = breaks_[leg];
    const double t1 = breaks_[leg + 1];
    const double s = (t - t0) / (t1 - t0);
    if (const auto *seg = std::get_if<Segment>(&legs_[leg]))
        return seg->from + s * (seg->to - seg->from);
    const auto &a = std::get<Arc>(legs_[leg]);
    return arc_point(a, a.angle_from + s * (a.angle_to - a.angle_from));
}

cplx PathSpec::point(double t) const { return point_on_leg(t, leg_index(t)); }

cplx PathSpec::tangent(double t, std::size_t leg) const
{
    const double dt = breaks_[leg + 1] - breaks_[leg];
    if (const auto *seg = std::get_if<Segment>(&legs_[leg]))
        return (seg->to - seg->from) / dt;
    const auto &a = std::get<Arc>(legs_[leg]);
    const double s = (t - breaks_[leg]) / dt;
    const double span = a.angle_to - a.angle_from;
    return I * a.radius * std::exp(I * (a.angle_from + s * span)) * (span / dt);
}

PathSpec PathSpec::reversed() const
{
    std::vector<Leg> legs;
    legs.reserve(legs_.size());
    for (auto it = legs_.rbegin(); it != legs_.rend(); ++it) {
        if (const auto *s = std::get_if<Segment>(&*it))
            legs.emplace_back(Segment{s->to, s->from});
        else {
            const auto &a = std::get<Arc>(*it);
            legs.emplace_back(Arc{a.center, a.radius, a.angle_to, a.angle_from});
        }
    }
    return PathSpec(std::move(legs));
}

PathSpec PathSpec::subpath(double t0, double t1) const
{
    t0 = std::clamp(t0, 0.0, 1.0);
    t1 = std::clamp(t1, 0.0, 1.0);
    if (!(t1 > t0))
        throw InvalidArgument("subpath needs t0 < t1");
    std::vector<Leg> legs;
    for (std::size_t i = 0; i < legs_.size(); ++i) {
        const double a = breaks_[i];
        const double b = breaks_[i + 1];
        const double lo = std::max(a, t0);
        const double hi = std::min(b, t1);
        // Slivers left by rounding at leg breaks are dropped.
        if (hi <= lo || (hi - lo < 1e-14 && (t1 - t0) > 1e-13))
            continue;
        legs.push_back(leg_slice(legs_[i], (lo - a) / (b - a), (hi - a) / (b - a)));
    }
    return PathSpec(std::move(legs));
}

PathSpec PathSpec::then(const PathSpec &next) const
{
    auto legs = legs_;
    legs.insert(legs.end(), next.legs_.begin(), next.legs_.end());
    return PathSpec(std::move(legs));
}

} // namespace merogeo
