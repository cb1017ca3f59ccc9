#pragma once

// Random metric fixtures shared by unit and acceptance tests.

#include <random>

#include "merogeo/geodesic.hpp"

namespace fixtures {

using merogeo::cplx;
using merogeo::Expr;

inline cplx small_complex(std::mt19937_64 &rng, double scale)
{
    std::uniform_real_distribution<double> d(-scale, scale);
    return {d(rng), d(rng)};
}

inline cplx near_one(std::mt19937_64 &rng, double spread)
{
    return cplx(1.0) + small_complex(rng, spread);
}

inline Expr poly(std::initializer_list<cplx> coeffs)
{
    using namespace merogeo;
    Expr u = variable();
    Expr acc = constant(0.0);
    int k = 0;
    for (auto c : coeffs) {
        if (c != cplx(0.0))
            acc = acc + constant(c) * (k == 0 ? constant(1.0) : power(u, k));
        ++k;
    }
    return acc;
}

// Smooth, slowly varying warped product without singularities near the
// origin: b1 = beta exp(e u)(1 + g u^2), a_k = alpha exp(e u), f_k = phi (1 + d u^2).
inline merogeo::MetricSpec gentle_warped(std::mt19937_64 &rng, std::size_t n)
{
    using namespace merogeo;
    Expr u = variable();
    auto b1 = constant(near_one(rng, 0.3)) * exp(constant(small_complex(rng, 0.15)) * u)
              * poly({1.0, 0.0, small_complex(rng, 0.02)});
    std::vector<Expr> a, f;
    for (std::size_t k = 2; k <= n; ++k) {
        a.push_back(constant(near_one(rng, 0.3)) * exp(constant(small_complex(rng, 0.15)) * u));
        f.push_back(poly({near_one(rng, 0.3), 0.0, small_complex(rng, 0.02)}));
    }
    return MetricSpec::planar(b1, a, f);
}

// Random rational warped product: each datum is (p0 + p1 u + p2 u^2) / (q0 + q1 u).
inline merogeo::MetricSpec rational_warped(std::mt19937_64 &rng, std::size_t n)
{
    using namespace merogeo;
    auto rational = [&] {
        return poly({near_one(rng, 0.5), small_complex(rng, 1.0), small_complex(rng, 1.0)})
               / poly({near_one(rng, 0.5), small_complex(rng, 1.0)});
    };
    auto b1 = rational();
    std::vector<Expr> a, f;
    for (std::size_t k = 2; k <= n; ++k) {
        a.push_back(rational());
        f.push_back(rational());
    }
    return MetricSpec::planar(b1, a, f);
}

inline std::vector<cplx> random_point(std::mt19937_64 &rng, std::size_t n, double scale)
{
    std::vector<cplx> u(n);
    for (auto &x : u)
        x = small_complex(rng, scale);
    return u;
}

} // namespace fixtures
