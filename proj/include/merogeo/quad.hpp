#pragma once

#include <cstdint>
#include <vector>

#include "merogeo/expr.hpp"

namespace merogeo {

// Antiderivatives of 1/sqrt(Q), Q(eta) = a eta^2 + b eta + c:
//   Log            (1/sqrt a) log(eta + b/2a + sqrt(eta^2 + (b/a) eta + c/a))
//   DegenerateLog  (1/sqrt a) log(eta + b/2a)
//   Sqrt           (2/b) sqrt(b eta + c)
//   Linear         eta / sqrt c
enum class QuadCase { Log, DegenerateLog, Sqrt, Linear };
const char *to_string(QuadCase c);

QuadCase classify_quadratic(cplx a, cplx b, cplx c);

// A germ of the antiderivative: the square root of Q is fixed at `base` to
// `root`, and the antiderivative takes the value `offset` there. Evaluation
// continues both along the straight segment from the base.
struct QuadBranch {
    cplx a{}, b{}, c{};
    QuadCase tag = QuadCase::Linear;
    cplx base{};
    cplx root{};
    cplx offset{};

    // Throws InvalidArgument when root^2 differs from Q(base), or when Q(base) = 0
    // outside the Sqrt case.
    static QuadBranch make(cplx a, cplx b, cplx c, cplx base, cplx root);
    // Principal square root at the base.
    static QuadBranch principal(cplx a, cplx b, cplx c, cplx base = 0.0);

    cplx discriminant() const { return b * b - 4.0 * a * c; }
    cplx q(cplx eta) const { return (a * eta + b) * eta + c; }
    // Zeros of Q (none, one or two).
    std::vector<cplx> zeros() const;
};

// Value at eta continued from the base. Throws BranchCutCrossing when the
// segment from the base passes through (or too near) a zero of Q.
cplx antiderivative(const QuadBranch &qb, cplx eta);

// The same germ rebased at eta (offset and square root continued).
QuadBranch continue_to(const QuadBranch &qb, cplx eta);

// sqrt(Q(eta)) continued from the base.
cplx continued_root(const QuadBranch &qb, cplx eta);

// |d/deta antiderivative - 1/sqrt(Q)| where the derivative comes from jets of
// the closed form and the square root is continued independently by stepping
// along the segment and choosing the nearer of the two roots.
double check_derivative(const QuadBranch &qb, cplx eta);

struct QuadSelfTest {
    QuadCase tag;
    int points = 0;
    double max_error = 0.0;
};

// Random branch-safe points for one fixture per case.
std::vector<QuadSelfTest> quad_self_test(int points_per_case, std::uint64_t seed);

// The same check for user coefficients on random branch-safe points in a disc
// that covers the zeros of Q.
QuadSelfTest quad_check(cplx a, cplx b, cplx c, int points, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Closed-form first coordinate for metrics
//   (h')^2 du1^2 + sum_k f_k(u_k)^2 du_k^2 / P_k(h(u1)).
// With Q(x) = A_1 - sum_l A_l P_l(x), the germ satisfies
//   Phi(h(u1(z))) = z - z0,  Phi' = 1/sqrt(Q),  sqrt(Q(h(u1(z0)))) = h'(u1(z0)) udot1(z0).

// Coefficients c0, c1, c2 of a polynomial of degree <= 2.
using Quadratic = std::vector<cplx>;

struct EsempioGerm {
    cplx z{};
    cplx u{};
    QuadBranch branch; // based at h(u)
};

struct NewtonOptions {
    int max_iterations = 30;
    double min_step = 1e-12; // as a fraction of the requested z displacement
    double collision = 1e-8;
};

// Q from the first integrals; P[l] pairs with A[l + 1].
QuadBranch esempio_quadratic(const std::vector<Quadratic> &P, const std::vector<cplx> &A, cplx eta0, cplx root);

// Throws BranchAmbiguity when h'(u0) = 0 or Q(h(u0)) = 0.
EsempioGerm esempio_seed(const Expr &h, const std::vector<Quadratic> &P, const std::vector<cplx> &A, cplx z0, cplx u0,
                         cplx udot0, const NewtonOptions &opts = {});

// Follows the germ along the straight segment to z by damped Newton steps on
// Phi(h(u)) = z - z_germ with adaptive subdivision.
// Throws NewtonDivergence or BranchAmbiguity.
EsempioGerm closed_form_advance(const EsempioGerm &germ, const Expr &h, cplx z, const NewtonOptions &opts = {});

cplx closed_form_geodesic_u1(const Expr &h, const std::vector<Quadratic> &P, const std::vector<cplx> &A, cplx z,
                             cplx z0, cplx u0, cplx udot0, const NewtonOptions &opts = {});

} // namespace merogeo
