#include "merogeo/quad.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace merogeo {

namespace {

constexpr double zero_margin = 1e-12;

double segment_distance(cplx p, cplx q, cplx r)
{
    const cplx d = q - p;
    const double len2 = std::norm(d);
    if (len2 == 0.0)
        return std::abs(r - p);
    const double s = std::clamp(((r - p) * std::conj(d)).real() / len2, 0.0, 1.0);
    return std::abs(p + s * d - r);
}

// Rejects segments whose interior passes through a zero of Q; the endpoints may sit on one.
void check_segment(const QuadBranch &qb, cplx eta)
{
    for (auto r : qb.zeros()) {
        const double margin = zero_margin * (1.0 + std::abs(r));
        if (std::abs(r - qb.base) <= margin || std::abs(r - eta) <= margin)
            continue;
        if (segment_distance(qb.base, eta, r) <= margin)
            throw BranchCutCrossing("path of continuation passes through a zero of the quadratic");
    }
}

cplx beta(const QuadBranch &qb) { return qb.b / (2.0 * qb.a); }

// sqrt((eta - r1)(eta - r2)) continued from s0 at the base along the segment.
cplx log_case_s(const QuadBranch &qb, cplx s0, cplx eta)
{
    const auto z = qb.zeros();
    cplx s = s0;
    for (auto r : z)
        s *= std::sqrt((eta - r) / (qb.base - r));
    return s;
}

cplx sqrt_ka(const QuadBranch &qb) { return std::sqrt(qb.a); }

// Increment of log(w) along the segment, with w continuous; subdivides until
// consecutive ratios stay near 1 so principal logs add up exactly.
template <class W>
cplx log_increment(W w, cplx x0, cplx w0, cplx x1, cplx w1, int depth)
{
    const cplx ratio = w1 / w0;
    if (std::abs(ratio - 1.0) < 0.5 || depth > 60)
        return std::log(ratio);
    const cplx xm = 0.5 * (x0 + x1);
    const cplx wm = w(xm);
    return log_increment(w, x0, w0, xm, wm, depth + 1) + log_increment(w, xm, wm, x1, w1, depth + 1);
}

// Phi(eta) - Phi(base) and the continued sqrt(Q(eta)).
struct Local {
    cplx phi;
    cplx root;
};

Local local_value(const QuadBranch &qb, cplx eta)
{
    check_segment(qb, eta);
    switch (qb.tag) {
    case QuadCase::Linear:
        return {(eta - qb.base) / qb.root, qb.root};
    case QuadCase::Sqrt: {
        const cplx r = -qb.c / qb.b;
        const cplx S = qb.root == cplx(0.0) ? std::sqrt(qb.b * eta + qb.c) : qb.root * std::sqrt((eta - r) / (qb.base - r));
        return {2.0 / qb.b * (S - qb.root), S};
    }
    case QuadCase::DegenerateLog: {
        const cplx bb = beta(qb);
        const cplx k = qb.root / (qb.base + bb);
        return {std::log((eta + bb) / (qb.base + bb)) / k, k * (eta + bb)};
    }
    case QuadCase::Log: {
        const cplx ka = sqrt_ka(qb);
        const cplx s0 = qb.root / ka;
        const cplx bb = beta(qb);
        auto w = [&](cplx x) { return x + bb + log_case_s(qb, s0, x); };
        const cplx w0 = qb.base + bb + s0;
        const cplx s = log_case_s(qb, s0, eta);
        const cplx w1 = eta + bb + s;
        // Subdivide the segment coarsely first so that the recursion starts near 1.
        constexpr int pieces = 16;
        cplx total = 0.0;
        cplx xa = qb.base, wa = w0;
        for (int i = 1; i <= pieces; ++i) {
            const cplx xb = i == pieces ? eta : qb.base + (eta - qb.base) * (static_cast<double>(i) / pieces);
            const cplx wb = i == pieces ? w1 : w(xb);
            total += log_increment(w, xa, wa, xb, wb, 0);
            xa = xb;
            wa = wb;
        }
        return {total / ka, ka * s};
    }
    }
    return {};
}

} // namespace

const char *to_string(QuadCase c)
{
    switch (c) {
    case QuadCase::Log:
        return "log";
    case QuadCase::DegenerateLog:
        return "degenerate_log";
    case QuadCase::Sqrt:
        return "sqrt";
    case QuadCase::Linear:
        return "linear";
    }
    return "?";
}

QuadCase classify_quadratic(cplx a, cplx b, cplx c)
{
    if (a == cplx(0.0))
        return b == cplx(0.0) ? QuadCase::Linear : QuadCase::Sqrt;
    const cplx delta = b * b - 4.0 * a * c;
    if (std::abs(delta) <= 1e-14 * (std::norm(b) + std::abs(4.0 * a * c)))
        return QuadCase::DegenerateLog;
    return QuadCase::Log;
}

QuadBranch QuadBranch::make(cplx a, cplx b, cplx c, cplx base, cplx root)
{
    QuadBranch qb;
    qb.a = a;
    qb.b = b;
    qb.c = c;
    qb.tag = classify_quadratic(a, b, c);
    qb.base = base;
    qb.root = root;
    if (qb.tag == QuadCase::Linear && c == cplx(0.0))
        throw InvalidArgument("quadratic vanishes identically");
    const cplx qv = qb.q(base);
    const double scale = 1.0 + std::abs(qv) + std::abs(a * base * base) + std::abs(b * base) + std::abs(c);
    if (std::abs(root * root - qv) > 1e-8 * scale)
        throw InvalidArgument("square root value does not match the quadratic at the base point");
    if (root == cplx(0.0) && qb.tag != QuadCase::Sqrt)
        throw InvalidArgument("base point is a zero of the quadratic");
    return qb;
}

QuadBranch QuadBranch::principal(cplx a, cplx b, cplx c, cplx base)
{
    return make(a, b, c, base, std::sqrt((a * base + b) * base + c));
}

std::vector<cplx> QuadBranch::zeros() const
{
    switch (tag) {
    case QuadCase::Linear:
        return {};
    case QuadCase::Sqrt:
        return {-c / b};
    case QuadCase::DegenerateLog:
        return {-b / (2.0 * a)};
    case QuadCase::Log: {
        const cplx sd = std::sqrt(discriminant());
        const cplx qp = -0.5 * (b + sd), qm = -0.5 * (b - sd);
        const cplx q = std::abs(qp) >= std::abs(qm) ? qp : qm;
        return {q / a, c / q};
    }
    }
    return {};
}

cplx antiderivative(const QuadBranch &qb, cplx eta)
{
    return qb.offset + local_value(qb, eta).phi;
}

cplx continued_root(const QuadBranch &qb, cplx eta)
{
    return local_value(qb, eta).root;
}

QuadBranch continue_to(const QuadBranch &qb, cplx eta)
{
    const auto v = local_value(qb, eta);
    QuadBranch out = qb;
    out.base = eta;
    out.root = v.root;
    out.offset = qb.offset + v.phi;
    return out;
}

double check_derivative(const QuadBranch &qb, cplx eta)
{
    const auto v = local_value(qb, eta);
    const Jet2 x = Jet2::variable(eta);
    cplx dphi;
    switch (qb.tag) {
    case QuadCase::Linear:
        dphi = 1.0 / qb.root;
        break;
    case QuadCase::Sqrt: {
        const Jet2 S = sqrt_on_branch(Jet2::constant(qb.b) * x + Jet2::constant(qb.c), v.root);
        dphi = 2.0 / qb.b * S.d1;
        break;
    }
    case QuadCase::DegenerateLog: {
        const cplx k = qb.root / (qb.base + beta(qb));
        const Jet2 L = log_on_branch(x + Jet2::constant(beta(qb)), 0.0);
        dphi = L.d1 / k;
        break;
    }
    case QuadCase::Log: {
        const cplx ka = sqrt_ka(qb);
        const Jet2 qa = (x * x + Jet2::constant(qb.b / qb.a) * x + Jet2::constant(qb.c / qb.a));
        const Jet2 s = sqrt_on_branch(qa, v.root / ka);
        const Jet2 L = log_on_branch(x + Jet2::constant(beta(qb)) + s, 0.0);
        dphi = L.d1 / ka;
        break;
    }
    }

    // Independent continuation of sqrt(Q): follow the nearer root in small steps.
    const int steps = 4096;
    cplx root = qb.root;
    for (int i = 1; i <= steps; ++i) {
        const cplx x = qb.base + (eta - qb.base) * (static_cast<double>(i) / steps);
        const cplx cand = std::sqrt(qb.q(x));
        root = std::abs(cand - root) <= std::abs(cand + root) ? cand : -cand;
    }
    return std::abs(dphi - 1.0 / root);
}

std::vector<QuadSelfTest> quad_self_test(int points_per_case, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto rc = [&](double s) { return cplx(s * unit(rng), s * unit(rng)); };

    std::vector<QuadSelfTest> out;
    for (auto tag : {QuadCase::Log, QuadCase::DegenerateLog, QuadCase::Sqrt, QuadCase::Linear}) {
        QuadSelfTest t{tag};
        while (t.points < points_per_case) {
            cplx a = 0.0, b = 0.0, c = 0.0;
            switch (tag) {
            case QuadCase::Log:
                a = rc(2.0);
                b = rc(2.0);
                c = rc(2.0);
                break;
            case QuadCase::DegenerateLog: {
                a = rc(2.0);
                const cplx r = rc(2.0);
                b = -2.0 * a * r;
                c = a * r * r;
                break;
            }
            case QuadCase::Sqrt:
                b = rc(2.0);
                c = rc(2.0);
                break;
            case QuadCase::Linear:
                c = rc(2.0);
                break;
            }
            const bool has_a = tag == QuadCase::Log || tag == QuadCase::DegenerateLog;
            if (classify_quadratic(a, b, c) != tag || (has_a && std::abs(a) < 0.1)
                || (tag == QuadCase::Sqrt && std::abs(b) < 0.1) || std::abs(c) < 0.1)
                continue;
            const cplx base = rc(2.0);
            const cplx eta = rc(5.0 / std::sqrt(2.0));
            auto qb = QuadBranch::principal(a, b, c, base);
            bool safe = std::abs(qb.q(base)) > 0.1;
            for (auto r : qb.zeros())
                safe = safe && segment_distance(base, eta, r) > 0.1;
            if (!safe)
                continue;
            t.max_error = std::max(t.max_error, check_derivative(qb, eta));
            ++t.points;
        }
        out.push_back(t);
    }
    return out;
}

QuadSelfTest quad_check(cplx a, cplx b, cplx c, int points, std::uint64_t seed)
{
    if (points < 1)
        throw InvalidArgument("need at least one point");
    QuadSelfTest t{classify_quadratic(a, b, c)};
    auto probe = QuadBranch::principal(a, b, c, 0.0 + std::abs(b) + std::abs(c) + 1.0);
    // Sample inside a disc that covers the zeros, keeping away from them.
    double scale = 2.0;
    for (auto r : probe.zeros())
        scale = std::max(scale, 2.0 * std::abs(r));
    const double margin = 0.05 * scale;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto rc = [&] { return cplx(scale * unit(rng), scale * unit(rng)); };
    for (int attempt = 0; t.points < points; ++attempt) {
        if (attempt > 1000 * points)
            throw InvalidArgument("no branch-safe sample points found");
        const cplx base = rc();
        const cplx eta = rc();
        if (std::abs(probe.q(base)) < margin * margin)
            continue;
        bool safe = true;
        for (auto r : probe.zeros())
            safe = safe && segment_distance(base, eta, r) > margin;
        if (!safe)
            continue;
        t.max_error = std::max(t.max_error, check_derivative(QuadBranch::principal(a, b, c, base), eta));
        ++t.points;
    }
    return t;
}

// ---------------------------------------------------------------------------

QuadBranch esempio_quadratic(const std::vector<Quadratic> &P, const std::vector<cplx> &A, cplx eta0, cplx root)
{
    if (A.size() != P.size() + 1)
        throw InvalidArgument("need one first integral per polynomial plus A_1");
    cplx q[3] = {A[0], 0.0, 0.0};
    for (std::size_t l = 0; l < P.size(); ++l) {
        if (P[l].size() > 3)
            throw InvalidArgument("polynomials must have degree at most 2");
        for (std::size_t i = 0; i < P[l].size(); ++i)
            q[i] -= A[l + 1] * P[l][i];
    }
    return QuadBranch::make(q[2], q[1], q[0], eta0, root);
}

EsempioGerm esempio_seed(const Expr &h, const std::vector<Quadratic> &P, const std::vector<cplx> &A, cplx z0, cplx u0,
                         cplx udot0, const NewtonOptions &opts)
{
    const auto hj = try_eval_jet(h, u0);
    if (!hj)
        throw PoleError(u0);
    const cplx root = hj->d1 * udot0;
    if (std::abs(hj->d1) < opts.collision || std::abs(root) < opts.collision)
        throw BranchAmbiguity("seed sits where two preimages collide");
    return {z0, u0, esempio_quadratic(P, A, hj->value, root)};
}

EsempioGerm closed_form_advance(const EsempioGerm &germ, const Expr &h, cplx z, const NewtonOptions &opts)
{
    EsempioGerm cur = germ;
    const cplx total = z - germ.z;
    if (total == cplx(0.0))
        return cur;
    double step = 1.0; // fraction of the total displacement
    double done = 0.0;

    while (done < 1.0) {
        const double frac = std::min(step, 1.0 - done);
        if (frac < opts.min_step)
            throw NewtonDivergence("Newton continuation stalled");
        const bool last = done + frac >= 1.0 - 1e-15;
        const cplx target_z = last ? z : germ.z + total * (done + frac);
        const cplx dz = target_z - cur.z;

        const auto h0 = try_eval_jet(h, cur.u);
        if (!h0)
            throw PoleError(cur.u);
        const cplx dudz = cur.branch.root / h0->d1;
        const cplx guess = cur.u + dz * dudz;
        const cplx goal = cur.branch.offset + dz;

        cplx u = guess;
        bool converged = false;
        try {
            for (int it = 0; it < opts.max_iterations; ++it) {
                const auto hj = try_eval_jet(h, u);
                if (!hj || std::abs(hj->d1) < opts.collision)
                    break;
                const auto v = local_value(cur.branch, hj->value);
                const cplx F = cur.branch.offset + v.phi - goal;
                const cplx dF = hj->d1 / v.root;
                cplx du = F / dF;
                // Damping: never move further than the predictor step allows.
                const double cap = 0.5 * std::abs(dz * dudz) + 1e-300;
                if (std::abs(du) > cap)
                    du *= cap / std::abs(du);
                u -= du;
                if (std::abs(du) <= 1e-15 * (1.0 + std::abs(u)) && std::abs(F) <= 1e-13 * (1.0 + std::abs(goal))) {
                    converged = true;
                    break;
                }
                if (std::abs(F) <= 1e-15 * (1.0 + std::abs(goal))) {
                    converged = true;
                    break;
                }
            }
        } catch (const BranchCutCrossing &) {
            converged = false;
        }
        // The corrected point must stay near the predictor, otherwise Newton
        // may have jumped to another preimage.
        if (converged && std::abs(u - guess) > 0.25 * std::abs(dz * dudz) + 1e-13 * (1.0 + std::abs(u)))
            converged = false;
        if (!converged) {
            step = frac * 0.5;
            continue;
        }

        const auto hj = try_eval_jet(h, u);
        const auto next = continue_to(cur.branch, hj->value);
        if (std::abs(hj->d1) < opts.collision || std::abs(next.root) < opts.collision)
            throw BranchAmbiguity("two preimages collide along the continuation");
        cur.z = target_z;
        cur.u = u;
        cur.branch = next;
        done = last ? 1.0 : done + frac;
        step = std::min(1.0, frac * 2.0);
    }
    return cur;
}

cplx closed_form_geodesic_u1(const Expr &h, const std::vector<Quadratic> &P, const std::vector<cplx> &A, cplx z,
                             cplx z0, cplx u0, cplx udot0, const NewtonOptions &opts)
{
    return closed_form_advance(esempio_seed(h, P, A, z0, u0, udot0, opts), h, z, opts).u;
}

} // namespace merogeo
