#include "doctest.h"

#include <cmath>
#include <numbers>

#include "merogeo/path.hpp"

using namespace merogeo;
using namespace std::complex_literals;

namespace {

constexpr double pi = std::numbers::pi;

bool near(cplx a, cplx b, double tol = 1e-13)
{
    return std::abs(a - b) <= tol;
}

} // namespace

TEST_CASE("segment and arc geometry")
{
    auto s = PathSpec::segment(0.0, 3.0 + 4.0i);
    CHECK(s.arclength() == doctest::Approx(5.0));
    CHECK(near(s.point(0.5), 1.5 + 2.0i));
    CHECK(near(s.tangent(0.5, 0), 3.0 + 4.0i));

    auto c = PathSpec::circle(1.0, 3.0);
    CHECK(c.arclength() == doctest::Approx(4.0 * pi));
    CHECK(c.is_closed());
    CHECK(near(c.point(0.25), 1.0 + 2.0i));
    // dz/dt has modulus equal to the arclength.
    CHECK(std::abs(c.tangent(0.3, 0)) == doctest::Approx(c.arclength()));

    PathSpec clockwise({Arc{0.0, 1.0, pi / 2, -pi / 2}});
    CHECK(near(clockwise.point(0.5), 1.0));
    CHECK(near(PathSpec::circle(0.0, 1.0, 3).end(), 1.0, 1e-12));
}

TEST_CASE("multi-leg parametrization is proportional to arclength")
{
    auto p = PathSpec::polyline({0.0, 1.0, 1.0 + 3.0i});
    CHECK(p.arclength() == doctest::Approx(4.0));
    CHECK(p.leg_t(1) == doctest::Approx(0.25));
    CHECK(p.leg_index(0.1) == 0);
    CHECK(p.leg_index(0.25) == 1);
    CHECK(p.leg_index(1.0) == 1);
    CHECK(near(p.point(0.25), 1.0));
    CHECK(near(p.point(0.5), 1.0 + 1.0i));
    CHECK(near(p.tangent(0.5, 1), 4.0i));
}

TEST_CASE("reversed, subpath and concatenation")
{
    PathSpec p({Segment{0.0, 2.0}, Arc{0.0, 2.0, 0.0, pi}});
    auto r = p.reversed();
    for (double t : {0.0, 0.2, 0.5, 0.9, 1.0})
        CHECK(near(r.point(t), p.point(1.0 - t), 1e-12));

    auto sub = p.subpath(0.1, 0.8);
    CHECK(sub.arclength() == doctest::Approx(0.7 * p.arclength()));
    CHECK(near(sub.start(), p.point(0.1), 1e-12));
    CHECK(near(sub.end(), p.point(0.8), 1e-12));

    auto joined = PathSpec::segment(0.0, 1.0).then(PathSpec::segment(1.0, 1.0 + 1.0i));
    CHECK(joined.legs().size() == 2);
    CHECK(near(joined.end(), 1.0 + 1.0i));
}

TEST_CASE("invalid paths")
{
    CHECK_THROWS_AS(PathSpec(std::vector<Leg>{}), InvalidArgument);
    CHECK_THROWS_AS(PathSpec::segment(1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(PathSpec({Arc{0.0, -1.0, 0.0, 1.0}}), InvalidArgument);
    CHECK_THROWS_AS(PathSpec({Segment{0.0, 1.0}, Segment{2.0, 3.0}}), InvalidArgument);
    CHECK_THROWS_AS(PathSpec::segment(0.0, 1.0).subpath(0.5, 0.5), InvalidArgument);
}
