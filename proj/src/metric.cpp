#include "merogeo/metric.hpp"

#include <algorithm>
#include <cmath>

namespace merogeo {

bool domain_contains(FactorDomain d, cplx u)
{
    if (!std::isfinite(u.real()) || !std::isfinite(u.imag()))
        return false;
    return d == FactorDomain::Plane || std::abs(u) < 1.0;
}

MetricSpec::MetricSpec(std::vector<FactorDomain> domains, Expr b1, std::vector<Expr> a, std::vector<Expr> f)
    : domains_(std::move(domains)), b1_(std::move(b1)), a_(std::move(a)), f_(std::move(f))
{
    const auto n = domains_.size();
    if (n < 2)
        throw InvalidArgument("warped product needs N >= 2 factors");
    if (a_.size() != n - 1 || f_.size() != n - 1)
        throw InvalidArgument("expected N-1 warping functions a_k and fiber functions f_k");
    if (is_zero_constant(b1_))
        throw InvalidArgument("b1 must not be the zero function");
    for (std::size_t k = 0; k + 1 < n; ++k)
        if (is_zero_constant(a_[k]) || is_zero_constant(f_[k]))
            throw InvalidArgument("a_" + std::to_string(k + 2) + " and f_" + std::to_string(k + 2)
                                  + " must not be the zero function");

    entries_.reserve(n);
    entries_.push_back(b1_);
    for (std::size_t k = 2; k <= n; ++k)
        entries_.push_back(a_[k - 2] * substitute_variable(f_[k - 2], 0, static_cast<int>(k - 1)));
}

MetricSpec MetricSpec::planar(Expr b1, std::vector<Expr> a, std::vector<Expr> f)
{
    std::vector<FactorDomain> domains(a.size() + 1, FactorDomain::Plane);
    return MetricSpec(std::move(domains), std::move(b1), std::move(a), std::move(f));
}

MetricSpec MetricSpec::flat(std::size_t n)
{
    if (n < 2)
        throw InvalidArgument("warped product needs N >= 2 factors");
    return planar(constant(1.0), std::vector<Expr>(n - 1, constant(1.0)), std::vector<Expr>(n - 1, constant(1.0)));
}

void MetricSpec::check_domain(std::span<const cplx> u) const
{
    if (u.size() != dimension())
        throw InvalidArgument("point has " + std::to_string(u.size()) + " coordinates, metric has "
                              + std::to_string(dimension()));
    for (std::size_t i = 0; i < u.size(); ++i)
        if (!domain_contains(domains_[i], u[i]))
            throw DomainViolation("coordinate " + std::to_string(i + 1) + " leaves its factor domain");
}

std::vector<ExtComplex> metric_matrix(const MetricSpec &m, std::span<const cplx> u, const MetricThresholds &th)
{
    m.check_domain(u);
    std::vector<ExtComplex> g;
    g.reserve(m.dimension());
    g.push_back(eval(m.b1(), u[0], th.eval));
    for (std::size_t k = 2; k <= m.dimension(); ++k) {
        const auto a = eval(m.a(k), u[0], th.eval);
        const auto f = eval(m.f(k), u[k - 1], th.eval);
        if (a.infinite || f.infinite)
            g.push_back(ExtComplex::pole());
        else
            g.push_back(ExtComplex::finite(a.value * f.value));
    }
    return g;
}

OrdinaryCheck check_metrically_ordinary(const MetricSpec &m, std::span<const cplx> u, const MetricThresholds &th)
{
    if (u.size() != m.dimension())
        return {false, OrdinaryReason::WrongDimension, 0};
    for (std::size_t i = 0; i < u.size(); ++i)
        if (!domain_contains(m.domains()[i], u[i]))
            return {false, OrdinaryReason::OutsideDomain, i + 1};
    const auto g = metric_matrix(m, u, th);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i].infinite)
            return {false, OrdinaryReason::Pole, i + 1};
        if (std::abs(g[i].value) < th.degen_eps)
            return {false, OrdinaryReason::Degenerate, i + 1};
    }
    return {true, OrdinaryReason::Ordinary, 0};
}

void ChristoffelTable::set(int i, int j, int k, cplx value)
{
    entries_[{i, j, k}] = value;
    entries_[{j, i, k}] = value;
}

cplx ChristoffelTable::get(int i, int j, int k) const
{
    const auto it = entries_.find({i, j, k});
    return it == entries_.end() ? cplx{} : it->second;
}

bool ChristoffelTable::is_symmetric() const
{
    return std::all_of(entries_.begin(), entries_.end(), [&](const auto &kv) {
        const auto [i, j, k] = kv.first;
        const auto it = entries_.find({j, i, k});
        return it != entries_.end() && it->second == kv.second;
    });
}

bool ChristoffelTable::matches_warped_pattern() const
{
    return std::all_of(entries_.begin(), entries_.end(), [](const auto &kv) {
        const auto [i, j, k] = kv.first;
        if (k == 1)
            return i == j;
        return (i == k && j == k) || (i == 1 && j == k) || (i == k && j == 1);
    });
}

namespace {

struct Jets {
    Jet2 b1;
    std::vector<Jet2> a; // index k-2
    std::vector<Jet2> f;
};

Jets metric_jets(const MetricSpec &m, std::span<const cplx> u, const MetricThresholds &th)
{
    const auto check = check_metrically_ordinary(m, u, th);
    if (!check.ordinary)
        throw NotOrdinary("point is not metrically ordinary (diagonal entry " + std::to_string(check.entry) + ")");
    auto need = [&](const Expr &e, cplx p) {
        auto j = try_eval_jet(e, p, th.eval);
        if (!j)
            throw NotOrdinary("derivative of metric data has a pole at the point");
        return *j;
    };
    Jets jets{need(m.b1(), u[0]), {}, {}};
    for (std::size_t k = 2; k <= m.dimension(); ++k) {
        jets.a.push_back(need(m.a(k), u[0]));
        jets.f.push_back(need(m.f(k), u[k - 1]));
    }
    return jets;
}

} // namespace

ChristoffelTable christoffel_warped(const MetricSpec &m, std::span<const cplx> u, const MetricThresholds &th)
{
    const auto jets = metric_jets(m, u, th);
    const auto n = static_cast<int>(m.dimension());
    ChristoffelTable table(m.dimension());

    table.set(1, 1, 1, jets.b1.d1 / (2.0 * jets.b1.value));
    for (int i = 2; i <= n; ++i) {
        const auto &a = jets.a[static_cast<std::size_t>(i - 2)];
        const auto &f = jets.f[static_cast<std::size_t>(i - 2)];
        table.set(i, i, 1, -(a.d1 * f.value) / (2.0 * jets.b1.value));
        table.set(i, i, i, f.d1 / (2.0 * f.value));
        table.set(1, i, i, a.d1 / (2.0 * a.value));
    }
    return table;
}

ChristoffelTable christoffel_generic(const MetricSpec &m, std::span<const cplx> u, const MetricThresholds &th)
{
    const auto check = check_metrically_ordinary(m, u, th);
    if (!check.ordinary)
        throw NotOrdinary("point is not metrically ordinary (diagonal entry " + std::to_string(check.entry) + ")");

    const auto n = m.dimension();
    // g[i] and dg[i][mu] = d g_ii / d u^mu, 0-based.
    std::vector<cplx> g(n);
    std::vector<std::vector<cplx>> dg(n, std::vector<cplx>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t mu = 0; mu < n; ++mu) {
            auto jet = try_eval_jet(m.entry_expression(i + 1), u, static_cast<int>(mu), th.eval);
            if (!jet)
                throw NotOrdinary("metric entry derivative has a pole at the point");
            g[i] = jet->value;
            dg[i][mu] = jet->d1;
        }
    }
    // d_mu g_ab for the diagonal metric.
    auto dmetric = [&](std::size_t a, std::size_t b, std::size_t mu) { return a == b ? dg[a][mu] : cplx{}; };

    ChristoffelTable table(n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                const auto bracket = -dmetric(i, j, k) + dmetric(i, k, j) + dmetric(j, k, i);
                const auto value = bracket / (2.0 * g[k]);
                if (value != cplx{})
                    table.set(static_cast<int>(i + 1), static_cast<int>(j + 1), static_cast<int>(k + 1), value);
            }
    return table;
}

double max_relative_deviation(const ChristoffelTable &x, const ChristoffelTable &y)
{
    double worst = 0.0;
    auto visit = [&](const ChristoffelTable &p, const ChristoffelTable &q) {
        for (const auto &[key, value] : p.entries()) {
            const auto [i, j, k] = key;
            const auto other = q.get(i, j, k);
            const double scale = std::max(std::abs(value), std::abs(other));
            if (scale > 0.0)
                worst = std::max(worst, std::abs(value - other) / scale);
        }
    };
    visit(x, y);
    visit(y, x);
    return worst;
}

ExtComplex pairing(const MetricSpec &m, std::span<const cplx> u, std::span<const cplx> x, std::span<const cplx> y,
                   const MetricThresholds &th)
{
    if (x.size() != m.dimension() || y.size() != m.dimension())
        throw InvalidArgument("vector dimension does not match the metric");
    const auto g = metric_matrix(m, u, th);
    cplx sum{};
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i].infinite)
            return ExtComplex::pole();
        sum += g[i].value * x[i] * y[i];
    }
    return ExtComplex::finite(sum);
}

ExtComplex speed(const MetricSpec &m, std::span<const cplx> u, std::span<const cplx> v, const MetricThresholds &th)
{
    return pairing(m, u, v, v, th);
}

} // namespace merogeo
