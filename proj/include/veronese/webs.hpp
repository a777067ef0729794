#pragma once

// The integrable PDE families on a function f(x1,x2,x3):
//
//   A:  (l2-l3) f1 f23 + (l3-l1) f2 f31 + (l1-l2) f3 f12 = 0,   l_i = l_i(x_i)
//   B:  f1 f13 - f3 f11 + (l2-l3)(f1 f23 - f2 f13) + l2' f1 f3 = 0
//   C:  f1 f13 - f3 f11 + e^{-l3' x2}(f2 f12 - f1 f22) + l3'' x2 f1^2 = 0
//   D:  a (f1 f23 - f2 f13) + b (f3 f11 + f3 f22 - f1 f13 - f2 f23)
//        + l3 (f2 f13 - f1 f23) = 0,     a + ib holomorphic in x1 + i x2
//
// plus the constant-coefficient dispersionless Hirota equation
//   a f1 f23 + b f2 f13 + c f3 f12 = 0,  a + b + c = 0,
// and the hyper-CR equation  f13 - f22 + f2 f11 - f1 f12 = 0.
//
// Each of A-D carries a lambda-quadratic one-form alpha^lambda whose kernel
// field is spanned by a Lax pair; the closure residual
// alpha^lambda([v,w]) vanishes for all lambda exactly on solutions.

#include <veronese/field.hpp>
#include <veronese/nijenhuis.hpp>

#include <algorithm>
#include <utility>
#include <vector>

namespace veronese {

enum class Family { A, B, C, D, Hirota, HyperCR };

inline const char* to_string(Family f)
{
    switch (f) {
        case Family::A: return "A";
        case Family::B: return "B";
        case Family::C: return "C";
        case Family::D: return "D";
        case Family::Hirota: return "hirota";
        case Family::HyperCR: return "hyperCR";
    }
    return "?";
}

struct EquationSpec {
    Family family = Family::A;
    ScalarField l1, l2, l3; // univariate spectral parameters, as used per family
    ScalarField a, b;       // harmonic pair (family D)
    double hirota_a = 0.0, hirota_b = 0.0, hirota_c = 0.0;

    static EquationSpec A(ScalarField l1, ScalarField l2, ScalarField l3)
    {
        EquationSpec s;
        s.family = Family::A;
        s.l1 = std::move(l1);
        s.l2 = std::move(l2);
        s.l3 = std::move(l3);
        return s;
    }

    static EquationSpec A_constants(double c1, double c2, double c3)
    {
        if (c1 == c2 || c1 == c3 || c2 == c3)
            throw domain_error("family A constants must be pairwise distinct", c1);
        return A(constant_field(c1), constant_field(c2), constant_field(c3));
    }

    static EquationSpec B(ScalarField l2, ScalarField l3)
    {
        EquationSpec s;
        s.family = Family::B;
        s.l2 = std::move(l2);
        s.l3 = std::move(l3);
        return s;
    }

    static EquationSpec C(ScalarField l3)
    {
        EquationSpec s;
        s.family = Family::C;
        s.l3 = std::move(l3);
        return s;
    }

    static EquationSpec D(ScalarField a, ScalarField b, ScalarField l3)
    {
        EquationSpec s;
        s.family = Family::D;
        s.a = std::move(a);
        s.b = std::move(b);
        s.l3 = std::move(l3);
        return s;
    }

    static EquationSpec hirota(double a, double b, double c)
    {
        if (std::fabs(a + b + c) > 1e-12)
            throw domain_error("hirota constants must sum to zero", a + b + c);
        EquationSpec s;
        s.family = Family::Hirota;
        s.hirota_a = a;
        s.hirota_b = b;
        s.hirota_c = c;
        // spectral representatives with l2-l3 = a, l3-l1 = b, l1-l2 = c
        s.l1 = constant_field(0.0);
        s.l2 = constant_field(-c);
        s.l3 = constant_field(b);
        return s;
    }

    static EquationSpec hyper_cr()
    {
        EquationSpec s;
        s.family = Family::HyperCR;
        return s;
    }

    // equation A with lambda differences matching the Hirota constants
    static EquationSpec hirota_from_lambdas(double c1, double c2, double c3)
    {
        return hirota(c2 - c3, c3 - c1, c1 - c2);
    }
};

// Boxed specializations: A0..A3, B0..B3, C0, C1, D0..D3 of the families,
// with coordinate functions or the given constants as parameters.
inline EquationSpec equation_from_tag(NormalFormTag tag, double c1 = 1.0, double c2 = 2.0,
                                      double c3 = -3.0)
{
    using T = NormalFormTag;
    auto coord = [](int axis) { return coordinate_field(axis); };
    switch (tag) {
        case T::A0: return EquationSpec::A(coord(1), coord(2), coord(3));
        case T::A1: return EquationSpec::A(coord(1), coord(2), constant_field(c3));
        case T::A2: return EquationSpec::A(coord(1), constant_field(c2), constant_field(c3));
        case T::A3: return EquationSpec::A_constants(c1, c2, c3);
        case T::B0: return EquationSpec::B(coord(2), coord(3));
        case T::B1: return EquationSpec::B(coord(2), constant_field(c3));
        case T::B2: return EquationSpec::B(constant_field(c2), coord(3));
        case T::B3: return EquationSpec::B(constant_field(c2), constant_field(c3));
        case T::C0: return EquationSpec::C(coord(3));
        case T::C1: return EquationSpec::C(constant_field(c3));
        case T::D0: return EquationSpec::D(coord(1), coord(2), coord(3));
        case T::D1: return EquationSpec::D(coord(1), coord(2), constant_field(c3));
        case T::D2:
            return EquationSpec::D(constant_field(c1), constant_field(c2), coord(3));
        case T::D3:
        default:
            return EquationSpec::D(constant_field(c1), constant_field(c2), constant_field(c3));
    }
}

// Left-hand side of the family's equation at p.
inline double pde_residual(const EquationSpec& s, const ScalarField& f, const Vec3& p)
{
    const Jet3 F = f(p);
    const double f1 = F.grad[0], f2 = F.grad[1], f3 = F.grad[2];
    const double f11 = F.h(0, 0), f12 = F.h(0, 1), f13 = F.h(0, 2);
    const double f22 = F.h(1, 1), f23 = F.h(1, 2);
    switch (s.family) {
        case Family::A: {
            const double l1 = s.l1.value(p), l2 = s.l2.value(p), l3 = s.l3.value(p);
            return (l2 - l3) * f1 * f23 + (l3 - l1) * f2 * f13 + (l1 - l2) * f3 * f12;
        }
        case Family::B: {
            const Jet3 L2 = s.l2(p);
            const double l2 = L2.value, l2p = L2.grad[1];
            const double l3 = s.l3.value(p);
            return f1 * f13 - f3 * f11 + (l2 - l3) * (f1 * f23 - f2 * f13) + l2p * f1 * f3;
        }
        case Family::C: {
            const Jet3 L3 = s.l3(p);
            const double l3p = L3.grad[2], l3pp = L3.h(2, 2);
            const double arg = -l3p * p[1];
            if (std::fabs(arg) > 700.0)
                throw domain_error("family C exponential overflows", arg);
            return f1 * f13 - f3 * f11 + std::exp(arg) * (f2 * f12 - f1 * f22) +
                   l3pp * p[1] * f1 * f1;
        }
        case Family::D: {
            const double av = s.a.value(p), bv = s.b.value(p), l3 = s.l3.value(p);
            return av * (f1 * f23 - f2 * f13) +
                   bv * (f3 * f11 + f3 * f22 - f1 * f13 - f2 * f23) +
                   l3 * (f2 * f13 - f1 * f23);
        }
        case Family::Hirota:
            return s.hirota_a * f1 * f23 + s.hirota_b * f2 * f13 + s.hirota_c * f3 * f12;
        case Family::HyperCR:
            return f13 - f22 + f2 * f11 - f1 * f12;
    }
    throw evaluation_error("corrupt equation spec");
}

// The family's one-form alpha^lambda as coefficient fields for a fixed
// spectral value.  HyperCR carries no assigned form.
inline OneFormField veronese_form_fields(const EquationSpec& s, const ScalarField& f, double lambda)
{
    const ScalarField f1 = derivative_field(f, 1);
    const ScalarField f2 = derivative_field(f, 2);
    const ScalarField f3 = derivative_field(f, 3);
    const ScalarField lam = constant_field(lambda);
    switch (s.family) {
        case Family::A:
        case Family::Hirota: {
            const ScalarField q1 = s.l1 - lam, q2 = s.l2 - lam, q3 = s.l3 - lam;
            return {q2 * q3 * f1, q3 * q1 * f2, q1 * q2 * f3};
        }
        case Family::B: {
            const ScalarField q2 = s.l2 - lam, q3 = s.l3 - lam;
            return {q2 * q3 * f1, q2 * q3 * f2 - q3 * f1, q2 * q2 * f3};
        }
        case Family::C: {
            const ScalarField q3 = s.l3 - lam;
            const ScalarField E = exp_field(derivative_field(s.l3, 3) * coordinate_field(2));
            return {q3 * q3 * f1, q3 * q3 * f2 - q3 * E * f1, q3 * q3 * f3 - q3 * f2 + E * f1};
        }
        case Family::D: {
            const ScalarField q3 = s.l3 - lam, qa = s.a - lam;
            return {q3 * (qa * f1 - s.b * f2), q3 * (qa * f2 + s.b * f1),
                    (qa * qa + s.b * s.b) * f3};
        }
        case Family::HyperCR:
            throw evaluation_error("hyper-CR equation has no assigned Veronese form");
    }
    throw evaluation_error("corrupt equation spec");
}

inline Vec3 veronese_form(const EquationSpec& s, const ScalarField& f, const Vec3& p, double lambda)
{
    return veronese_form_fields(s, f, lambda)(p);
}

struct VeroneseCurve {
    Vec3 a0, a1, a2; // alpha^lambda = a0 + lambda a1 + lambda^2 a2
};

// The three covectors are recovered exactly from alpha at lambda = 0, +1, -1
// since alpha is quadratic in lambda.
inline VeroneseCurve veronese_curve(const EquationSpec& s, const ScalarField& f, const Vec3& p)
{
    const Vec3 a0 = veronese_form(s, f, p, 0.0);
    const Vec3 ap = veronese_form(s, f, p, 1.0);
    const Vec3 am = veronese_form(s, f, p, -1.0);
    VeroneseCurve c;
    c.a0 = a0;
    c.a1 = 0.5 * (ap - am);
    c.a2 = 0.5 * (ap + am) - a0;
    return c;
}

// det(a0; a1; a2): nonzero exactly where the solution is nondegenerate.
inline double nondegeneracy_det(const EquationSpec& s, const ScalarField& f, const Vec3& p)
{
    const VeroneseCurve c = veronese_curve(s, f, p);
    return det(Mat3{c.a0, c.a1, c.a2});
}

// Spectral values of the family at p (eigenvalues of the underlying operator).
inline std::vector<double> spectral_values(const EquationSpec& s, const Vec3& p)
{
    switch (s.family) {
        case Family::A:
        case Family::Hirota: return {s.l1.value(p), s.l2.value(p), s.l3.value(p)};
        case Family::B: return {s.l2.value(p), s.l3.value(p)};
        case Family::C:
        case Family::D: return {s.l3.value(p)};
        case Family::HyperCR: return {};
    }
    return {};
}

namespace detail {

inline VectorField form_cross_axis(const OneFormField& w, int axis)
{
    // cross product of the coefficient vector with the coordinate covector
    const ScalarField zero = constant_field(0.0);
    switch (axis) {
        case 0: return {zero, w.coeff[2], -w.coeff[1]};
        case 1: return {-w.coeff[2], zero, w.coeff[0]};
        default: return {w.coeff[1], -w.coeff[0], zero};
    }
}

inline VectorField normalize_at(const VectorField& X)
{
    const ScalarField n2 =
        X.comp[0] * X.comp[0] + X.comp[1] * X.comp[1] + X.comp[2] * X.comp[2];
    const ScalarField inv = constant_field(1.0) / sqrt_field(n2);
    return scale(inv, X);
}

} // namespace detail

// Two vector fields spanning ker alpha^lambda near anchor.  Families A and
// Hirota use the classical pair
//   v = (lambda-l1) f2 d1 - (lambda-l2) f1 d2,
//   w = (lambda-l2) f3 d2 - (lambda-l3) f2 d3;
// the other families take cross products of alpha with the two coordinate
// covectors of largest coefficient at the anchor (tie-break by index),
// normalized pointwise, falling back to the remaining index if the chosen
// pair degenerates.
inline std::pair<VectorField, VectorField> lax_pair_fields(const EquationSpec& s,
                                                           const ScalarField& f, double lambda,
                                                           const Vec3& anchor)
{
    if (s.family == Family::A || s.family == Family::Hirota) {
        const ScalarField f1 = derivative_field(f, 1);
        const ScalarField f2 = derivative_field(f, 2);
        const ScalarField f3 = derivative_field(f, 3);
        const ScalarField lam = constant_field(lambda);
        const ScalarField zero = constant_field(0.0);
        VectorField v{(lam - s.l1) * f2, -((lam - s.l2) * f1), zero};
        VectorField w{zero, (lam - s.l2) * f3, -((lam - s.l3) * f2)};
        const Vec3 vp = v(anchor), wp = w(anchor);
        if (norm(vp) == 0.0 && norm(wp) == 0.0)
            throw singular_error("Lax pair collapses at the anchor point");
        return {v, w};
    }

    const OneFormField alpha = veronese_form_fields(s, f, lambda);
    const Vec3 c = alpha(anchor);
    if (norm(c) < 1e-14 * (1.0 + lambda * lambda))
        throw singular_error("one-form alpha^lambda vanishes at the anchor point");
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int i, int j) {
        if (std::fabs(c[i]) != std::fabs(c[j])) return std::fabs(c[i]) > std::fabs(c[j]);
        return i < j;
    });
    VectorField v = detail::normalize_at(detail::form_cross_axis(alpha, idx[0]));
    VectorField w = detail::normalize_at(detail::form_cross_axis(alpha, idx[1]));
    if (norm(cross(v(anchor), w(anchor))) < 1e-8)
        w = detail::normalize_at(detail::form_cross_axis(alpha, idx[2]));
    return {v, w};
}

inline std::pair<Vec3, Vec3> lax_pair(const EquationSpec& s, const ScalarField& f, const Vec3& p,
                                      double lambda)
{
    auto [v, w] = lax_pair_fields(s, f, lambda, p);
    return {v(p), w(p)};
}

// alpha^lambda([v^lambda, w^lambda]) at p; vanishes for all lambda exactly on
// solutions of the family equation.
inline double lax_closure_residual(const EquationSpec& s, const ScalarField& f, const Vec3& p,
                                   double lambda)
{
    auto [v, w] = lax_pair_fields(s, f, lambda, p);
    const Vec3 bracket = lie_bracket(v, w, p);
    return dot(veronese_form(s, f, p, lambda), bracket);
}

// ---------------------------------------------------------------------------
// Point symmetries
// ---------------------------------------------------------------------------

// A finite point transformation: a chart diffeomorphism plus an optional
// post-composition applied to the function value (given as a univariate field
// in its first argument).
struct PointSymmetry {
    ChartMap coordinates = identity_chart();
    ScalarField post; // invalid() = identity
};

// Transformed candidate solution: post(f(inverse(x))).
inline ScalarField apply_point_symmetry(const ScalarField& f, const PointSymmetry& sym)
{
    ScalarField pulled = pullback(f, sym.coordinates.inverse);
    if (!sym.post.valid()) return pulled;
    const ScalarField post = sym.post;
    return ScalarField([pulled, post](const Vec3& p) {
        const Jet3 G = pulled(p);
        const Jet3 ladder = post({G.value, 0.0, 0.0});
        return jet_compose(G, ladder.value, ladder.grad[0], ladder.h(0, 0), ladder.t(0, 0, 0));
    });
}

// Largest forward-inverse round-trip defect over the probe points.
inline double symmetry_invertibility_defect(const PointSymmetry& sym, const std::vector<Vec3>& pts)
{
    double worst = 0.0;
    for (const Vec3& p : pts) worst = std::max(worst, sym.coordinates.roundtrip_defect(p));
    return worst;
}

} // namespace veronese
