#pragma once

// Truncated multivariate Taylor arithmetic in three variables through total
// degree 3.  A Jet3 carries the value of a function at a point together with
// all partial derivatives up to third order, one slot per unordered
// multi-index.  Products use the truncated Leibniz rule, analytic functions
// compose through their univariate Taylor ladder, so every slot is exact up
// to floating-point rounding.

#include <veronese/error.hpp>
#include <veronese/linalg.hpp>

#include <array>
#include <cmath>

namespace veronese {

namespace detail {

// symmetric pair index, 0-based axes, (0,0),(0,1),(0,2),(1,1),(1,2),(2,2)
constexpr int pair_index(int i, int j)
{
    const int a = i < j ? i : j;
    const int b = i < j ? j : i;
    return a * 3 - a * (a - 1) / 2 + (b - a);
}

// symmetric triple index, lexicographic over sorted (a<=b<=c)
constexpr int triple_index(int i, int j, int k)
{
    int a = i, b = j, c = k;
    if (a > b) { const int s = a; a = b; b = s; }
    if (b > c) { const int s = b; b = c; c = s; }
    if (a > b) { const int s = a; a = b; b = s; }
    if (a == 0) return pair_index(b, c);
    if (a == 1) return 6 + (b - 1) + (c - 1);
    return 9;
}

} // namespace detail

struct Jet3 {
    double value = 0.0;
    std::array<double, 3> grad{};   // first partials
    std::array<double, 6> hess{};   // symmetric second partials
    std::array<double, 10> third{}; // symmetric third partials

    double& h(int i, int j) { return hess[detail::pair_index(i, j)]; }
    double h(int i, int j) const { return hess[detail::pair_index(i, j)]; }
    double& t(int i, int j, int k) { return third[detail::triple_index(i, j, k)]; }
    double t(int i, int j, int k) const { return third[detail::triple_index(i, j, k)]; }
};

inline Jet3 jet_constant(double c)
{
    Jet3 r;
    r.value = c;
    return r;
}

// Coordinate function x_axis as a jet at p.  axis is 1-based (x1, x2, x3).
inline Jet3 jet_coordinate(int axis, const Vec3& p)
{
    if (axis < 1 || axis > 3) throw domain_error("coordinate axis out of range", axis);
    Jet3 r;
    r.value = p[axis - 1];
    r.grad[axis - 1] = 1.0;
    return r;
}

inline Jet3 operator+(const Jet3& a, const Jet3& b)
{
    Jet3 r;
    r.value = a.value + b.value;
    for (int i = 0; i < 3; ++i) r.grad[i] = a.grad[i] + b.grad[i];
    for (int i = 0; i < 6; ++i) r.hess[i] = a.hess[i] + b.hess[i];
    for (int i = 0; i < 10; ++i) r.third[i] = a.third[i] + b.third[i];
    return r;
}

inline Jet3 operator-(const Jet3& a)
{
    Jet3 r;
    r.value = -a.value;
    for (int i = 0; i < 3; ++i) r.grad[i] = -a.grad[i];
    for (int i = 0; i < 6; ++i) r.hess[i] = -a.hess[i];
    for (int i = 0; i < 10; ++i) r.third[i] = -a.third[i];
    return r;
}

inline Jet3 operator-(const Jet3& a, const Jet3& b) { return a + (-b); }

inline Jet3 operator*(double s, const Jet3& a)
{
    Jet3 r;
    r.value = s * a.value;
    for (int i = 0; i < 3; ++i) r.grad[i] = s * a.grad[i];
    for (int i = 0; i < 6; ++i) r.hess[i] = s * a.hess[i];
    for (int i = 0; i < 10; ++i) r.third[i] = s * a.third[i];
    return r;
}

inline Jet3 operator*(const Jet3& a, double s) { return s * a; }
inline Jet3 operator+(const Jet3& a, double s) { Jet3 r = a; r.value += s; return r; }
inline Jet3 operator+(double s, const Jet3& a) { return a + s; }
inline Jet3 operator-(const Jet3& a, double s) { return a + (-s); }
inline Jet3 operator-(double s, const Jet3& a) { return (-a) + s; }

// Degree-3 truncation of the product series.  Each slot is the Leibniz
// expansion over sub-multi-indices of the slot's multi-index.
inline Jet3 operator*(const Jet3& a, const Jet3& b)
{
    Jet3 r;
    r.value = a.value * b.value;
    for (int i = 0; i < 3; ++i) r.grad[i] = a.value * b.grad[i] + b.value * a.grad[i];
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j)
            r.h(i, j) = a.value * b.h(i, j) + a.grad[i] * b.grad[j] + a.grad[j] * b.grad[i] +
                        b.value * a.h(i, j);
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j)
            for (int k = j; k < 3; ++k)
                r.t(i, j, k) = a.value * b.t(i, j, k) +
                               a.grad[i] * b.h(j, k) + a.grad[j] * b.h(i, k) + a.grad[k] * b.h(i, j) +
                               a.h(j, k) * b.grad[i] + a.h(i, k) * b.grad[j] + a.h(i, j) * b.grad[k] +
                               b.value * a.t(i, j, k);
    return r;
}

// g(a) for a univariate analytic g with Taylor ladder (g, g', g'', g''') at
// a.value.  Splitting off the constant part u = a - a.value makes the
// Faa-di-Bruno sum a plain truncated polynomial in u.
inline Jet3 jet_compose(const Jet3& a, double g0, double g1, double g2, double g3)
{
    Jet3 u = a;
    u.value = 0.0;
    const Jet3 u2 = u * u;
    const Jet3 u3 = u2 * u;
    return jet_constant(g0) + g1 * u + (g2 / 2.0) * u2 + (g3 / 6.0) * u3;
}

inline Jet3 jet_exp(const Jet3& a)
{
    if (std::fabs(a.value) > 700.0) throw domain_error("exp argument overflows", a.value);
    const double e = std::exp(a.value);
    return jet_compose(a, e, e, e, e);
}

inline Jet3 jet_ln(const Jet3& a)
{
    if (!(a.value > 0.0)) throw domain_error("ln of nonpositive value", a.value);
    const double i1 = 1.0 / a.value;
    return jet_compose(a, std::log(a.value), i1, -i1 * i1, 2.0 * i1 * i1 * i1);
}

inline Jet3 jet_reciprocal(const Jet3& a)
{
    if (a.value == 0.0 || !std::isfinite(a.value))
        throw domain_error("reciprocal of zero or nonfinite value", a.value);
    const double i1 = 1.0 / a.value;
    const double i2 = i1 * i1;
    return jet_compose(a, i1, -i2, 2.0 * i2 * i1, -6.0 * i2 * i2);
}

inline Jet3 jet_sqrt(const Jet3& a)
{
    if (!(a.value > 0.0)) throw domain_error("sqrt of nonpositive value", a.value);
    const double s = std::sqrt(a.value);
    const double i1 = 1.0 / a.value;
    return jet_compose(a, s, 0.5 * s * i1, -0.25 * s * i1 * i1, 0.375 * s * i1 * i1 * i1);
}

// a^n for integer n; repeated multiplication keeps the truncation exact.
inline Jet3 jet_ipow(const Jet3& a, int n)
{
    if (n < 0) return jet_reciprocal(jet_ipow(a, -n));
    Jet3 r = jet_constant(1.0);
    Jet3 base = a;
    int e = n;
    while (e > 0) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

inline Jet3 operator/(const Jet3& a, const Jet3& b) { return a * jet_reciprocal(b); }
inline Jet3 operator/(const Jet3& a, double s)
{
    if (s == 0.0) throw domain_error("division by zero", s);
    return (1.0 / s) * a;
}
inline Jet3 operator/(double s, const Jet3& b) { return s * jet_reciprocal(b); }

} // namespace veronese
