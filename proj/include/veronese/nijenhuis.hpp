#pragma once

// Nijenhuis operators on a 3D chart: the stable nondegenerate normal forms
// (real semisimple A, 2+1 Jordan B, full Jordan block C, complex semisimple
// D), their generic-point specializations A0..A3, B0..B3, C0, C1, D0..D3 with
// companion (Frobenius) forms F and conjugating operators P with P J P^-1 = F,
// the Nijenhuis-tensor and partial-Nijenhuis residuals, pushforward checks,
// and the construction of an operator from self-propelled functions on a
// frame.

#include <veronese/field.hpp>
#include <veronese/probe.hpp>

#include <string>
#include <vector>

namespace veronese {

// 3x3 matrix-valued field acting on tangent vectors in the chart basis.
struct OperatorField {
    std::array<std::array<ScalarField, 3>, 3> entry; // entry[i][j] = J^i_j

    Mat3 operator()(const Vec3& p) const
    {
        Mat3 m;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m[i][j] = entry[i][j].value(p);
        return m;
    }

    VectorField apply(const VectorField& X) const
    {
        VectorField r;
        for (int i = 0; i < 3; ++i)
            r.comp[i] = entry[i][0] * X.comp[0] + entry[i][1] * X.comp[1] + entry[i][2] * X.comp[2];
        return r;
    }
};

inline OperatorField operator_from_constant(const Mat3& m)
{
    OperatorField J;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) J.entry[i][j] = constant_field(m[i][j]);
    return J;
}

inline OperatorField diag_operator(ScalarField a, ScalarField b, ScalarField c)
{
    OperatorField J;
    const ScalarField zero = constant_field(0.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) J.entry[i][j] = zero;
    J.entry[0][0] = std::move(a);
    J.entry[1][1] = std::move(b);
    J.entry[2][2] = std::move(c);
    return J;
}

// ---------------------------------------------------------------------------
// General normal forms with functional parameters
// ---------------------------------------------------------------------------

// Real semisimple: diag(l1(x1), l2(x2), l3(x3)).
inline OperatorField family_A_operator(ScalarField l1, ScalarField l2, ScalarField l3)
{
    return diag_operator(std::move(l1), std::move(l2), std::move(l3));
}

// 2x2 Jordan block with eigenvalue l2(x2) plus eigenvalue l3(x3).
inline OperatorField family_B_operator(ScalarField l2, ScalarField l3)
{
    OperatorField J = diag_operator(l2, l2, std::move(l3));
    J.entry[0][1] = constant_field(1.0);
    return J;
}

// 3x3 Jordan block with eigenvalue l3(x3); the (1,2) entry is e^{l3'(x3) x2}.
inline OperatorField family_C_operator(ScalarField l3)
{
    OperatorField J = diag_operator(l3, l3, l3);
    const ScalarField l3p = derivative_field(l3, 3);
    J.entry[0][1] = exp_field(l3p * coordinate_field(2));
    J.entry[1][2] = constant_field(1.0);
    return J;
}

// Complex semisimple: eigenvalues a(x1,x2) +- i b(x1,x2) and l3(x3); (a,b)
// must be harmonic conjugates.
inline OperatorField family_D_operator(ScalarField a, ScalarField b, ScalarField l3)
{
    OperatorField J = diag_operator(a, a, std::move(l3));
    J.entry[0][1] = -b;
    J.entry[1][0] = std::move(b);
    return J;
}

// max(|a_{x1} - b_{x2}|, |a_{x2} + b_{x1}|): zero iff a + ib is holomorphic.
inline double harmonic_conjugacy_residual(const ScalarField& a, const ScalarField& b, const Vec3& p)
{
    const Jet3 ja = a(p), jb = b(p);
    return std::max(std::fabs(ja.grad[0] - jb.grad[1]), std::fabs(ja.grad[1] + jb.grad[0]));
}

// ---------------------------------------------------------------------------
// Generic-point specializations and their companion data
// ---------------------------------------------------------------------------

enum class NormalFormTag { A0, A1, A2, A3, B0, B1, B2, B3, C0, C1, D0, D1, D2, D3 };

inline const char* to_string(NormalFormTag t)
{
    switch (t) {
        case NormalFormTag::A0: return "A0";
        case NormalFormTag::A1: return "A1";
        case NormalFormTag::A2: return "A2";
        case NormalFormTag::A3: return "A3";
        case NormalFormTag::B0: return "B0";
        case NormalFormTag::B1: return "B1";
        case NormalFormTag::B2: return "B2";
        case NormalFormTag::B3: return "B3";
        case NormalFormTag::C0: return "C0";
        case NormalFormTag::C1: return "C1";
        case NormalFormTag::D0: return "D0";
        case NormalFormTag::D1: return "D1";
        case NormalFormTag::D2: return "D2";
        case NormalFormTag::D3: return "D3";
    }
    return "?";
}

inline std::vector<NormalFormTag> all_normal_form_tags()
{
    using T = NormalFormTag;
    return {T::A0, T::A1, T::A2, T::A3, T::B0, T::B1, T::B2, T::B3,
            T::C0, T::C1, T::D0, T::D1, T::D2, T::D3};
}

struct NormalFormSpec {
    NormalFormTag tag = NormalFormTag::A0;
    double c1 = 1.0;
    double c2 = 2.0;
    double c3 = -3.0;

    void validate() const
    {
        using T = NormalFormTag;
        auto distinct = [&](double u, double v, const char* what) {
            if (u == v) throw domain_error(std::string("coincident constants in ") + what, u);
        };
        switch (tag) {
            case T::A3: distinct(c1, c2, "A3"); [[fallthrough]];
            case T::A2: distinct(c2, c3, "A2/A3"); distinct(c1, c3, "A2/A3"); break;
            case T::B3: distinct(c2, c3, "B3"); break;
            case T::D2:
            case T::D3:
                if (c2 == 0.0) throw domain_error("c2 must be nonzero for D2/D3", c2);
                break;
            default: break;
        }
    }
};

namespace detail {

inline ScalarField coord_or_const(bool functional, int axis, double c)
{
    return functional ? coordinate_field(axis) : constant_field(c);
}

// which parameters stay functional for each tag
struct TagShape {
    char family;
    bool f1, f2, f3; // slot i is a coordinate function (true) or a constant
};

inline TagShape tag_shape(NormalFormTag t)
{
    using T = NormalFormTag;
    switch (t) {
        case T::A0: return {'A', true, true, true};
        case T::A1: return {'A', true, true, false};
        case T::A2: return {'A', true, false, false};
        case T::A3: return {'A', false, false, false};
        case T::B0: return {'B', false, true, true};
        case T::B1: return {'B', false, true, false};
        case T::B2: return {'B', false, false, true};
        case T::B3: return {'B', false, false, false};
        case T::C0: return {'C', false, false, true};
        case T::C1: return {'C', false, false, false};
        case T::D0: return {'D', true, true, true};
        case T::D1: return {'D', true, true, false};
        case T::D2: return {'D', false, false, true};
        case T::D3: return {'D', false, false, false};
    }
    return {'A', true, true, true};
}

} // namespace detail

// The operator J_X of the specialization: the matrix of the corresponding
// family form with the tag's choice of coordinate/constant parameters.
inline OperatorField normal_form_operator(const NormalFormSpec& s)
{
    s.validate();
    const auto sh = detail::tag_shape(s.tag);
    using detail::coord_or_const;
    switch (sh.family) {
        case 'A':
            return family_A_operator(coord_or_const(sh.f1, 1, s.c1), coord_or_const(sh.f2, 2, s.c2),
                                     coord_or_const(sh.f3, 3, s.c3));
        case 'B':
            return family_B_operator(coord_or_const(sh.f2, 2, s.c2), coord_or_const(sh.f3, 3, s.c3));
        case 'C': {
            // the tabulated specialization uses its own chart, related to the
            // family-C form by (x1,x2,x3) -> (x2, x1 e^{-x2}, x3):
            // rows (x3, 0, 1 / 1, x3, -x2 / 0, 0, x3)
            OperatorField J = diag_operator(coord_or_const(sh.f3, 3, s.c3),
                                            coord_or_const(sh.f3, 3, s.c3),
                                            coord_or_const(sh.f3, 3, s.c3));
            J.entry[0][2] = constant_field(1.0);
            J.entry[1][0] = constant_field(1.0);
            J.entry[1][2] = s.tag == NormalFormTag::C0 ? -coordinate_field(2) : constant_field(-1.0);
            return J;
        }
        case 'D':
        default:
            return family_D_operator(coord_or_const(sh.f1, 1, s.c1), coord_or_const(sh.f2, 2, s.c2),
                                     coord_or_const(sh.f3, 3, s.c3));
    }
}

// Companion (cyclic Frobenius) matrix with characteristic polynomial
// t^3 - e1 t^2 + e2 t - e3.
inline OperatorField symmetric_companion(const ScalarField& e1, const ScalarField& e2,
                                         const ScalarField& e3)
{
    OperatorField F;
    const ScalarField zero = constant_field(0.0);
    F.entry[0][0] = zero;
    F.entry[0][1] = zero;
    F.entry[0][2] = e3;
    F.entry[1][0] = constant_field(1.0);
    F.entry[1][1] = zero;
    F.entry[1][2] = -e2;
    F.entry[2][0] = zero;
    F.entry[2][1] = constant_field(1.0);
    F.entry[2][2] = e1;
    return F;
}

inline OperatorField companion_of_roots(const ScalarField& u, const ScalarField& v,
                                        const ScalarField& w)
{
    return symmetric_companion(u + v + w, u * v + u * w + v * w, u * v * w);
}

// F_X for the tag: the companion form of the operator's spectrum.
inline OperatorField companion_form(const NormalFormSpec& s)
{
    s.validate();
    const auto sh = detail::tag_shape(s.tag);
    using detail::coord_or_const;
    const ScalarField p1 = coord_or_const(sh.f1, 1, s.c1);
    const ScalarField p2 = coord_or_const(sh.f2, 2, s.c2);
    const ScalarField p3 = coord_or_const(sh.f3, 3, s.c3);
    switch (sh.family) {
        case 'A': return companion_of_roots(p1, p2, p3);
        case 'B': return companion_of_roots(p2, p2, p3);
        case 'C': return companion_of_roots(p3, p3, p3);
        case 'D':
        default: {
            // roots a +- ib and l3: e1 = 2a + l3, e2 = a^2 + b^2 + 2 a l3,
            // e3 = (a^2 + b^2) l3
            const ScalarField m = p1 * p1 + p2 * p2;
            return symmetric_companion(2.0 * p1 + p3, m + 2.0 * (p1 * p3), m * p3);
        }
    }
}

// The conjugating operator P_X with P J P^-1 = F.  Entries are rational in
// the tag's parameters; the denominators are the tag's pole locus.
inline OperatorField companion_conjugator(const NormalFormSpec& s)
{
    s.validate();
    const auto sh = detail::tag_shape(s.tag);
    using detail::coord_or_const;
    const ScalarField one = constant_field(1.0);
    const ScalarField p1 = coord_or_const(sh.f1, 1, s.c1);
    const ScalarField p2 = coord_or_const(sh.f2, 2, s.c2);
    const ScalarField p3 = coord_or_const(sh.f3, 3, s.c3);
    OperatorField P;
    switch (sh.family) {
        case 'A': {
            // column i carries the monomial coefficients of the Lagrange
            // numerator prod_{j != i}(t - p_j) over its denominator
            const std::array<ScalarField, 3> u{p1, p2, p3};
            for (int i = 0; i < 3; ++i) {
                const ScalarField& a = u[(i + 1) % 3];
                const ScalarField& b = u[(i + 2) % 3];
                const ScalarField den = (u[i] - a) * (u[i] - b);
                P.entry[0][i] = a * b / den;
                P.entry[1][i] = -(a + b) / den;
                P.entry[2][i] = one / den;
            }
            break;
        }
        case 'B': {
            const ScalarField d = p2 - p3;
            const ScalarField d2 = d * d;
            P.entry[0][0] = p2 * p3 / d;
            P.entry[0][1] = -(p3 * (2.0 * p2 - p3)) / d2;
            P.entry[0][2] = p2 * p2 / d2;
            P.entry[1][0] = -(p2 + p3) / d;
            P.entry[1][1] = 2.0 * p2 / d2;
            P.entry[1][2] = -(2.0 * p2) / d2;
            P.entry[2][0] = one / d;
            P.entry[2][1] = -(one / d2);
            P.entry[2][2] = one / d2;
            break;
        }
        case 'C': {
            const ScalarField v = s.tag == NormalFormTag::C0 ? coordinate_field(2) : one;
            P.entry[0][0] = -p3;
            P.entry[0][1] = p3 * p3;
            P.entry[0][2] = v * p3 + 1.0;
            P.entry[1][0] = one;
            P.entry[1][1] = -2.0 * p3;
            P.entry[1][2] = -v;
            P.entry[2][0] = constant_field(0.0);
            P.entry[2][1] = one;
            P.entry[2][2] = constant_field(0.0);
            break;
        }
        case 'D':
        default: {
            const ScalarField q = (p1 - p3) * (p1 - p3) + p2 * p2;
            const ScalarField vq = p2 * q;
            P.entry[0][0] = -(p3 * (2.0 * p1 - p3)) / q;
            P.entry[0][1] = p3 * (p1 * p1 - p1 * p3 - p2 * p2) / vq;
            P.entry[0][2] = (p1 * p1 + p2 * p2) / q;
            P.entry[1][0] = 2.0 * p1 / q;
            P.entry[1][1] = -((p1 * p1 - p2 * p2 - p3 * p3) / vq);
            P.entry[1][2] = -(2.0 * p1 / q);
            P.entry[2][0] = -(constant_field(1.0) / q);
            P.entry[2][1] = (p1 - p3) / vq;
            P.entry[2][2] = one / q;
            break;
        }
    }
    return P;
}

// Distance-like gauge to the tag's pole locus (the denominators of P_X and
// the coincidence set of its spectrum); empty when the tag has no poles.
inline PoleGauge pole_gauge(const NormalFormSpec& s)
{
    using T = NormalFormTag;
    const double c2 = s.c2, c3 = s.c3;
    switch (s.tag) {
        case T::A0:
            return [](const Vec3& p) {
                return std::min({std::fabs(p[0] - p[1]), std::fabs(p[0] - p[2]),
                                 std::fabs(p[1] - p[2])});
            };
        case T::A1:
            return [c3](const Vec3& p) {
                return std::min({std::fabs(p[0] - p[1]), std::fabs(p[0] - c3),
                                 std::fabs(p[1] - c3)});
            };
        case T::A2:
            return [c2, c3](const Vec3& p) {
                return std::min(std::fabs(p[0] - c2), std::fabs(p[0] - c3));
            };
        case T::B0: return [](const Vec3& p) { return std::fabs(p[1] - p[2]); };
        case T::B1: return [c3](const Vec3& p) { return std::fabs(p[1] - c3); };
        case T::B2: return [c2](const Vec3& p) { return std::fabs(c2 - p[2]); };
        case T::D0:
        case T::D1: return [](const Vec3& p) { return std::fabs(p[1]); };
        default: return {};
    }
}

// ---------------------------------------------------------------------------
// Residuals
// ---------------------------------------------------------------------------

// N_J(X,Y) = [JX,JY] - J[JX,Y] - J[X,JY] + J^2[X,Y] at p.
inline Vec3 nijenhuis_tensor(const OperatorField& J, const VectorField& X, const VectorField& Y,
                             const Vec3& p)
{
    const VectorField JX = J.apply(X);
    const VectorField JY = J.apply(Y);
    const Mat3 Jp = J(p);
    const Vec3 t1 = lie_bracket(JX, JY, p);
    const Vec3 t2 = mat_vec(Jp, lie_bracket(JX, Y, p));
    const Vec3 t3 = mat_vec(Jp, lie_bracket(X, JY, p));
    const Vec3 t4 = mat_vec(Jp, mat_vec(Jp, lie_bracket(X, Y, p)));
    return t1 - t2 - t3 + t4;
}

struct PnoResiduals {
    double leaf_defect;  // df([X,Y]_J) -- condition 1
    Vec3 nijenhuis;      // N_J(X,Y)    -- condition 2
};

// Residuals of the two partial-Nijenhuis-operator conditions for J restricted
// to the foliation {f = const}.  X and Y must be tangent at p.
inline PnoResiduals pno_residuals(const OperatorField& J, const ScalarField& f,
                                  const VectorField& X, const VectorField& Y, const Vec3& p)
{
    const Vec3 df = f(p).grad;
    const Vec3 xp = X(p), yp = Y(p);
    const double scale = std::max(1.0, norm(df)) * std::max({1.0, norm(xp), norm(yp)});
    if (std::fabs(dot(df, xp)) > 1e-10 * scale || std::fabs(dot(df, yp)) > 1e-10 * scale)
        throw evaluation_error("pno_residuals: field is not tangent to the foliation at p");

    const VectorField JX = J.apply(X);
    const VectorField JY = J.apply(Y);
    const Mat3 Jp = J(p);
    // [X,Y]_J = [JX,Y] + [X,JY] - J[X,Y]
    const Vec3 bj =
        lie_bracket(JX, Y, p) + lie_bracket(X, JY, p) - mat_vec(Jp, lie_bracket(X, Y, p));
    const Vec3 nj = lie_bracket(JX, JY, p) - mat_vec(Jp, bj);
    return {dot(df, bj), nj};
}

// max-norm of P J P^-1 - F at p for the tag's table data.
inline double frobenius_conjugation_residual(const NormalFormSpec& s, const Vec3& p)
{
    const Mat3 P = companion_conjugator(s)(p);
    const double d = det(P);
    if (d == 0.0 || !std::isfinite(d)) throw singular_error("conjugating operator is singular at p");
    const Mat3 J = normal_form_operator(s)(p);
    const Mat3 F = companion_form(s)(p);
    return max_abs(mat_sub(mat_mul(P, mat_mul(J, inverse(P))), F));
}

// max-norm of (DPhi J_src DPhi^-1)(at Phi(p)) - J_dst(Phi(p)).
inline double pushforward_residual(const ChartMap& phi, const OperatorField& J_src,
                                   const OperatorField& J_dst, const Vec3& p)
{
    const Mat3 D = phi.jacobian(p);
    const Mat3 pushed = mat_mul(D, mat_mul(J_src(p), inverse(D)));
    return max_abs(mat_sub(pushed, J_dst(phi(p))));
}

// ---------------------------------------------------------------------------
// Construction from self-propelled functions
// ---------------------------------------------------------------------------

namespace detail {

inline std::array<std::array<ScalarField, 3>, 3> frame_matrix(const std::array<VectorField, 3>& fr)
{
    std::array<std::array<ScalarField, 3>, 3> M;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) M[i][j] = fr[j].comp[i]; // column j = frame vector j
    return M;
}

inline ScalarField field_det(const std::array<std::array<ScalarField, 3>, 3>& m)
{
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

inline std::array<std::array<ScalarField, 3>, 3>
field_adjugate(const std::array<std::array<ScalarField, 3>, 3>& m)
{
    std::array<std::array<ScalarField, 3>, 3> a;
    a[0][0] = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    a[0][1] = m[0][2] * m[2][1] - m[0][1] * m[2][2];
    a[0][2] = m[0][1] * m[1][2] - m[0][2] * m[1][1];
    a[1][0] = m[1][2] * m[2][0] - m[1][0] * m[2][2];
    a[1][1] = m[0][0] * m[2][2] - m[0][2] * m[2][0];
    a[1][2] = m[0][2] * m[1][0] - m[0][0] * m[1][2];
    a[2][0] = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    a[2][1] = m[0][1] * m[2][0] - m[0][0] * m[2][1];
    a[2][2] = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    return a;
}

} // namespace detail

// J whose matrix in the given frame is F_frame, expressed in chart basis:
// J = M F M^-1 with M the frame matrix.
inline OperatorField operator_in_frame(const std::array<VectorField, 3>& frame,
                                       const OperatorField& F_frame)
{
    const auto M = detail::frame_matrix(frame);
    const auto adj = detail::field_adjugate(M);
    const ScalarField den = detail::field_det(M);
    OperatorField J;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            ScalarField acc = constant_field(0.0);
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) acc = acc + M[i][k] * F_frame.entry[k][l] * adj[l][j];
            J.entry[i][j] = acc / den;
        }
    return J;
}

// One-form spanning (J ker df)^perp, computed as adj(J)^T df so no inverse is
// needed; defined up to scale by det J.
inline OneFormField annihilator_one_form(const OperatorField& J, const ScalarField& f)
{
    std::array<std::array<ScalarField, 3>, 3> m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = J.entry[i][j];
    const auto adj = detail::field_adjugate(m);
    OneFormField w;
    for (int i = 0; i < 3; ++i) {
        ScalarField acc = constant_field(0.0);
        for (int j = 0; j < 3; ++j) acc = acc + adj[j][i] * derivative_field(f, j + 1);
        w.coeff[i] = acc;
    }
    return w;
}

struct SelfPropelledBuildOptions {
    std::vector<Vec3> check_points; // empty = no precondition checks
    double tolerance = 1e-8;
    double frame_floor = 1e-10;
};

namespace detail {

inline void check_build_preconditions(const std::array<VectorField, 3>& frame,
                                      const std::vector<const ScalarField*>& phis,
                                      const SelfPropelledBuildOptions& opt)
{
    if (opt.check_points.empty()) return;
    const auto M = frame_matrix(frame);
    const ScalarField d = field_det(M);
    for (const Vec3& p : opt.check_points) {
        if (std::fabs(d.value(p)) < opt.frame_floor)
            throw singular_error("frame is degenerate at a probe point");
        for (const ScalarField* phi : phis) {
            const double r0 = (*phi).value(p) * directional_derivative(frame[0], *phi, p) -
                              directional_derivative(frame[1], *phi, p);
            const double r1 = (*phi).value(p) * directional_derivative(frame[1], *phi, p) -
                              directional_derivative(frame[2], *phi, p);
            if (std::max(std::fabs(r0), std::fabs(r1)) > opt.tolerance)
                throw evaluation_error("function is not self-propelled at a probe point");
        }
    }
}

} // namespace detail

// Operator whose frame matrix has columns (0,1,0), (0,0,1) and the symmetric
// functions of (phi1, phi2, phi3); Nijenhuis whenever the phi_i are
// self-propelled for the frame's web.
inline OperatorField build_from_self_propelled(const std::array<VectorField, 3>& frame,
                                               const ScalarField& phi1, const ScalarField& phi2,
                                               const ScalarField& phi3,
                                               const SelfPropelledBuildOptions& opt = {})
{
    detail::check_build_preconditions(frame, {&phi1, &phi2, &phi3}, opt);
    return operator_in_frame(frame, companion_of_roots(phi1, phi2, phi3));
}

// Variant for a complex-conjugate pair eta +- i zeta together with a real
// psi; the symmetric functions stay real.
inline OperatorField build_from_self_propelled_pair(const std::array<VectorField, 3>& frame,
                                                    const ScalarField& eta, const ScalarField& zeta,
                                                    const ScalarField& psi,
                                                    const SelfPropelledBuildOptions& opt = {})
{
    detail::check_build_preconditions(frame, {&psi}, opt); // pair residuals are the caller's check
    const ScalarField m = eta * eta + zeta * zeta;
    return operator_in_frame(
        frame, symmetric_companion(2.0 * eta + psi, m + 2.0 * (eta * psi), m * psi));
}

} // namespace veronese
