#pragma once

#include <complex>

namespace merogeo {

// Value and first two derivatives of a holomorphic function at a point.
struct Jet2 {
    std::complex<double> value{};
    std::complex<double> d1{};
    std::complex<double> d2{};

    static Jet2 constant(std::complex<double> c) { return {c, 0.0, 0.0}; }
    static Jet2 variable(std::complex<double> p) { return {p, 1.0, 0.0}; }

    friend bool operator==(const Jet2 &, const Jet2 &) = default;
};

inline Jet2 operator+(const Jet2 &a, const Jet2 &b) { return {a.value + b.value, a.d1 + b.d1, a.d2 + b.d2}; }
inline Jet2 operator-(const Jet2 &a, const Jet2 &b) { return {a.value - b.value, a.d1 - b.d1, a.d2 - b.d2}; }
inline Jet2 operator-(const Jet2 &a) { return {-a.value, -a.d1, -a.d2}; }

inline Jet2 operator*(const Jet2 &a, const Jet2 &b)
{
    return {a.value * b.value, a.d1 * b.value + a.value * b.d1,
            a.d2 * b.value + 2.0 * a.d1 * b.d1 + a.value * b.d2};
}

// Caller guarantees b.value != 0.
inline Jet2 operator/(const Jet2 &a, const Jet2 &b)
{
    const auto q = a.value / b.value;
    const auto q1 = (a.d1 - q * b.d1) / b.value;
    const auto q2 = (a.d2 - 2.0 * q1 * b.d1 - q * b.d2) / b.value;
    return {q, q1, q2};
}

inline Jet2 exp(const Jet2 &a)
{
    const auto e = std::exp(a.value);
    return {e, e * a.d1, e * (a.d2 + a.d1 * a.d1)};
}

// Square root on the branch whose value at the point is `root` (root^2 == a.value).
inline Jet2 sqrt_on_branch(const Jet2 &a, std::complex<double> root)
{
    const auto r1 = a.d1 / (2.0 * root);
    const auto r2 = (a.d2 - 2.0 * r1 * r1) / (2.0 * root);
    return {root, r1, r2};
}

// Logarithm on the branch whose value at the point is `log_value`.
inline Jet2 log_on_branch(const Jet2 &a, std::complex<double> log_value)
{
    const auto l1 = a.d1 / a.value;
    const auto l2 = a.d2 / a.value - l1 * l1;
    return {log_value, l1, l2};
}

} // namespace merogeo
