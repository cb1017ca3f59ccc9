#pragma once

#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "merogeo/expr.hpp"

namespace merogeo {

enum class FactorDomain { Plane, UnitDisc };

bool domain_contains(FactorDomain d, cplx u);

// Diagonal warped-product metric
//   b1(u1) du1^2 + sum_{k>=2} a_k(u1) f_k(u_k) du_k^2
// Every expression is in the single variable "u". Index 0 of `a` and `f`
// corresponds to factor 2.
class MetricSpec {
public:
    MetricSpec(std::vector<FactorDomain> domains, Expr b1, std::vector<Expr> a, std::vector<Expr> f);

    // All factors in the plane.
    static MetricSpec planar(Expr b1, std::vector<Expr> a, std::vector<Expr> f);
    // The complex-euclidean metric on C^n.
    static MetricSpec flat(std::size_t n);

    std::size_t dimension() const { return domains_.size(); }
    const std::vector<FactorDomain> &domains() const { return domains_; }
    const Expr &b1() const { return b1_; }
    // k in [2, N]
    const Expr &a(std::size_t k) const { return a_.at(k - 2); }
    const Expr &f(std::size_t k) const { return f_.at(k - 2); }

    // g_ii as an expression in the N variables u1..uN (0-based variable indices).
    const Expr &entry_expression(std::size_t i) const { return entries_.at(i - 1); }

    // Throws DomainViolation when some coordinate leaves its factor.
    void check_domain(std::span<const cplx> u) const;

private:
    std::vector<FactorDomain> domains_;
    Expr b1_;
    std::vector<Expr> a_;
    std::vector<Expr> f_;
    std::vector<Expr> entries_;
};

struct MetricThresholds {
    EvalOptions eval{};
    // A diagonal entry is degenerate when |g_kk| < degen_eps.
    double degen_eps = 1e-12;
};

// Diagonal entries g_11 .. g_NN.
std::vector<ExtComplex> metric_matrix(const MetricSpec &m, std::span<const cplx> u, const MetricThresholds &th = {});

enum class OrdinaryReason { Ordinary, Pole, Degenerate, OutsideDomain, WrongDimension };

struct OrdinaryCheck {
    bool ordinary = false;
    OrdinaryReason reason = OrdinaryReason::Ordinary;
    std::size_t entry = 0; // 1-based diagonal index that failed, 0 when ordinary
};

OrdinaryCheck check_metrically_ordinary(const MetricSpec &m, std::span<const cplx> u,
                                        const MetricThresholds &th = {});

inline bool is_metrically_ordinary(const MetricSpec &m, std::span<const cplx> u, const MetricThresholds &th = {})
{
    return check_metrically_ordinary(m, u, th).ordinary;
}

// Gamma^k_ij with 1-based (i, j, k); only nonzero or structurally present
// entries are stored, with both (i, j) orders.
class ChristoffelTable {
public:
    using Key = std::tuple<int, int, int>; // (i, j, k)

    explicit ChristoffelTable(std::size_t n) : n_(n) {}

    std::size_t dimension() const { return n_; }
    // Stores at (i,j,k) and (j,i,k).
    void set(int i, int j, int k, cplx value);
    cplx get(int i, int j, int k) const;
    const std::map<Key, cplx> &entries() const { return entries_; }

    bool is_symmetric() const;
    // Only (1,1,1), (i,i,1), (k,k,k), (1,k,k), (k,1,k) may be stored.
    bool matches_warped_pattern() const;

private:
    std::size_t n_;
    std::map<Key, cplx> entries_;
};

// Closed formulas for the warped product. Throws NotOrdinary.
ChristoffelTable christoffel_warped(const MetricSpec &m, std::span<const cplx> u, const MetricThresholds &th = {});

// Generic diagonal-metric formula
//   2 Gamma^k_ij = g^kk (-d_k g_ij + d_j g_ik + d_i g_jk)
// with partial derivatives of the diagonal entries taken from jets.
ChristoffelTable christoffel_generic(const MetricSpec &m, std::span<const cplx> u, const MetricThresholds &th = {});

// Largest |x - y| / max(|x|, |y|) over the union of stored entries.
double max_relative_deviation(const ChristoffelTable &x, const ChristoffelTable &y);

// Lambda(v, v) at u.
ExtComplex speed(const MetricSpec &m, std::span<const cplx> u, std::span<const cplx> v, const MetricThresholds &th = {});

// Lambda(x, y) at u.
ExtComplex pairing(const MetricSpec &m, std::span<const cplx> u, std::span<const cplx> x, std::span<const cplx> y,
                   const MetricThresholds &th = {});

} // namespace merogeo
