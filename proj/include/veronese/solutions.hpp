#pragma once

// The sl2 web on R^3, its cross-ratio first integral, self-propelled
// functions (d phi proportional to alpha^phi, equivalently phi X0 phi = X1 phi
// and phi X1 phi = X2 phi), the frame compatibility polynomial, and a small
// library of exact solutions with their adapted charts.

#include <veronese/expr.hpp>
#include <veronese/probe.hpp>
#include <veronese/webs.hpp>

#include <cmath>
#include <functional>
#include <string>

namespace veronese {

// X0 = d1 + d2 + d3, X1 = sum x_i d_i, X2 = sum x_i^2 d_i;
// [X0,X1] = X0, [X1,X2] = X2, [X0,X2] = 2 X1.
inline std::array<VectorField, 3> sl2_frame()
{
    const ScalarField one = constant_field(1.0);
    VectorField X0{one, one, one};
    VectorField X1{coordinate_field(1), coordinate_field(2), coordinate_field(3)};
    VectorField X2{ipow_field(coordinate_field(1), 2), ipow_field(coordinate_field(2), 2),
                   ipow_field(coordinate_field(3), 2)};
    return {X0, X1, X2};
}

// F(x, lambda) = (x3-x2)(x1-lambda) / ((x1-x2)(x3-lambda)): for each lambda a
// first integral of the sl2 web's foliation F_lambda.
inline double cross_ratio(const Vec3& p, double lambda)
{
    const double den = (p[0] - p[1]) * (p[2] - lambda);
    if (den == 0.0) throw domain_error("cross-ratio pole", den);
    return (p[2] - p[1]) * (p[0] - lambda) / den;
}

// A lambda-parametric first integral: jets in the point at fixed lambda, and
// the lambda-derivative (closed form when given, else central differences).
struct WebFirstIntegral {
    std::function<Jet3(const Vec3&, double)> eval;
    std::function<double(const Vec3&, double)> dlambda; // optional

    double value(const Vec3& p, double lam) const { return eval(p, lam).value; }

    double lambda_derivative(const Vec3& p, double lam) const
    {
        if (dlambda) return dlambda(p, lam);
        const double h = 1e-6 * (1.0 + std::fabs(lam));
        return (value(p, lam + h) - value(p, lam - h)) / (2.0 * h);
    }
};

inline WebFirstIntegral cross_ratio_integral()
{
    WebFirstIntegral F;
    F.eval = [](const Vec3& p, double lam) {
        const Jet3 x1 = jet_coordinate(1, p), x2 = jet_coordinate(2, p), x3 = jet_coordinate(3, p);
        return (x3 - x2) * (x1 - lam) / ((x1 - x2) * (x3 - lam));
    };
    F.dlambda = [](const Vec3& p, double lam) {
        const double den = (p[0] - p[1]) * (p[2] - lam) * (p[2] - lam);
        if (den == 0.0) throw domain_error("cross-ratio pole", den);
        return (p[2] - p[1]) * (p[0] - p[2]) / den;
    };
    return F;
}

// The one-parameter family of self-propelled functions of the sl2 web,
// phi_c = (c x3 (x1-x2) + x1 (x3-x2)) / (c (x1-x2) + (x3-x2)), calibrated so
// that F(x, phi_c) = -c; c = 0, -1 and the infinite limit give x1, x2, x3.
inline ScalarField sl2_self_propelled(double c)
{
    const ScalarField x1 = coordinate_field(1), x2 = coordinate_field(2), x3 = coordinate_field(3);
    const ScalarField num = c * (x3 * (x1 - x2)) + x1 * (x3 - x2);
    const ScalarField den = c * (x1 - x2) + (x3 - x2);
    return num / den;
}

inline ScalarField sl2_self_propelled_infinity() { return coordinate_field(3); }

// Self-propelled pair (eta, zeta) of the sl2 web solving
// F(x, eta + i zeta) = 1 + i.
inline std::array<ScalarField, 2> sl2_self_propelled_pair()
{
    return {parse_field("((x1^2+x2*x3)*(x2+x3)-4*x1*x2*x3)/((x1-x2)^2+(x1-x3)^2)"),
            parse_field("((x2-x3)*(x1-x3)*(x1-x2))/((x1-x2)^2+(x1-x3)^2)")};
}

// (phi X0 phi - X1 phi, phi X1 phi - X2 phi) at p.
inline std::array<double, 2> self_propelled_residual(const std::array<VectorField, 3>& frame,
                                                     const ScalarField& phi, const Vec3& p)
{
    const double v = phi.value(p);
    const double d0 = directional_derivative(frame[0], phi, p);
    const double d1 = directional_derivative(frame[1], phi, p);
    const double d2 = directional_derivative(frame[2], phi, p);
    return {v * d0 - d1, v * d1 - d2};
}

// Residuals of the complexified system for the pair eta + i zeta:
// (eta X0 eta - zeta X0 zeta - X1 eta, eta X0 zeta + zeta X0 eta - X1 zeta,
//  eta X1 eta - zeta X1 zeta - X2 eta, eta X1 zeta + zeta X1 eta - X2 zeta).
inline std::array<double, 4> self_propelled_pair_residual(const std::array<VectorField, 3>& frame,
                                                          const ScalarField& eta,
                                                          const ScalarField& zeta, const Vec3& p)
{
    const double ev = eta.value(p), zv = zeta.value(p);
    double de[3], dz[3];
    for (int k = 0; k < 3; ++k) {
        de[k] = directional_derivative(frame[k], eta, p);
        dz[k] = directional_derivative(frame[k], zeta, p);
    }
    return {ev * de[0] - zv * dz[0] - de[1], ev * dz[0] + zv * de[0] - dz[1],
            ev * de[1] - zv * dz[1] - de[2], ev * dz[1] + zv * de[1] - dz[2]};
}

// Root phi of F(p, phi) = target(phi) by safeguarded Newton from the guess;
// target is a univariate field in its first argument.  Defect tolerance
// 1e-12, at most 100 iterations, bisection fallback once a sign change has
// been bracketed.
inline double self_propelled_solve(const WebFirstIntegral& F, const ScalarField& target,
                                   const Vec3& p, double guess)
{
    auto defect = [&](double t) { return F.value(p, t) - target.value({t, 0.0, 0.0}); };
    auto defect_slope = [&](double t) {
        const Jet3 tv = target({t, 0.0, 0.0});
        return F.lambda_derivative(p, t) - tv.grad[0];
    };

    auto iterate = [&](double t0, bool scan_for_bracket) {
        double t = t0;
        double r = defect(t);
        double lo = 0.0, hi = 0.0, rlo = 0.0;
        bool bracketed = false;
        if (scan_for_bracket && std::fabs(r) >= 1e-12) {
            const double h = 0.3 * (1.0 + std::fabs(t0));
            for (int k = 1; k <= 8 && !bracketed; ++k)
                for (double sgn : {1.0, -1.0}) {
                    const double cand = t0 + sgn * k * h;
                    double rc;
                    try {
                        rc = defect(cand);
                    } catch (const evaluation_error&) {
                        continue;
                    }
                    if (rc * r < 0.0) {
                        lo = cand;
                        rlo = rc;
                        hi = t;
                        bracketed = true;
                        break;
                    }
                }
        }
        for (int it = 0; it < 100; ++it) {
            if (std::fabs(r) < 1e-12) return t;
            const double slope = defect_slope(t);
            double next;
            if (slope == 0.0 || !std::isfinite(slope)) {
                if (!bracketed)
                    throw convergence_error("solver hit a critical point of the defect");
                next = 0.5 * (lo + hi);
            } else {
                next = t - r / slope;
                if (bracketed && (next < std::min(lo, hi) || next > std::max(lo, hi)))
                    next = 0.5 * (lo + hi);
            }
            double rn;
            try {
                rn = defect(next);
            } catch (const evaluation_error&) {
                if (!bracketed) throw;
                next = 0.5 * (lo + hi);
                rn = defect(next);
            }
            if (bracketed) {
                if (rn * rlo < 0.0) hi = next;
                else {
                    lo = next;
                    rlo = rn;
                }
            } else if (r * rn < 0.0) {
                lo = t;
                rlo = r;
                hi = next;
                bracketed = true;
            }
            t = next;
            r = rn;
        }
        throw convergence_error("self-propelled solver did not converge in 100 iterations");
    };

    try {
        return iterate(guess, false);
    } catch (const evaluation_error&) {
        // plain Newton failed from this guess: retry with an outward scan
        // for a sign-change bracket
        return iterate(guess, true);
    }
}

// The solved function as a field: values from the solver, gradient from
// implicit differentiation, grad phi = grad_x F / (target' - F_lambda).
// Exact through first order only.
inline ScalarField self_propelled_field(const WebFirstIntegral& F, const ScalarField& target,
                                        std::function<double(const Vec3&)> guess)
{
    return ScalarField([F, target, guess](const Vec3& p) {
        const double t = self_propelled_solve(F, target, p, guess(p));
        const Jet3 Fj = F.eval(p, t);
        const double denom = target({t, 0.0, 0.0}).grad[0] - F.lambda_derivative(p, t);
        if (denom == 0.0 || !std::isfinite(denom))
            throw convergence_error("implicit derivative degenerates at the root");
        Jet3 r;
        r.value = t;
        for (int i = 0; i < 3; ++i) r.grad[i] = Fj.grad[i] / denom;
        return r;
    });
}

// Coefficients (phi^0 .. phi^4) of the compatibility polynomial Psi_012 of a
// frame, with structure functions c_ij^k solved from [X_i,X_j] = c_ij^k X_k:
//   c12^0 + (c12^1 - c02^0) phi + (c01^0 - c02^1 + c12^2) phi^2
//         + (c01^1 - c02^2) phi^3 + c01^2 phi^4.
// All five vanish exactly when the frame carries a Veronese web.
namespace detail {

// Expand b in the frame columns of M.  Rank-deficient frames are accepted as
// long as b lies in their span; dependent columns (preferring the earliest
// independent ones) receive coefficient zero.  Brackets escaping the span
// raise a singularity error.
inline Vec3 expand_in_columns(const Mat3& M, const Vec3& b)
{
    double aug[3][4];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) aug[i][j] = M[i][j];
        aug[i][3] = b[i];
    }
    double scale = norm(b);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) scale = std::max(scale, std::fabs(M[i][j]));
    const double tol = 1e-11 * std::max(scale, 1.0);

    int pivot_row_of[3] = {-1, -1, -1};
    int next_row = 0;
    for (int col = 0; col < 3 && next_row < 3; ++col) {
        int best = -1;
        double best_mag = tol;
        for (int r = next_row; r < 3; ++r)
            if (std::fabs(aug[r][col]) > best_mag) {
                best = r;
                best_mag = std::fabs(aug[r][col]);
            }
        if (best < 0) continue; // dependent column
        for (int k = 0; k < 4; ++k) std::swap(aug[next_row][k], aug[best][k]);
        for (int r = 0; r < 3; ++r) {
            if (r == next_row) continue;
            const double factor = aug[r][col] / aug[next_row][col];
            for (int k = col; k < 4; ++k) aug[r][k] -= factor * aug[next_row][k];
        }
        pivot_row_of[col] = next_row;
        ++next_row;
    }
    for (int r = next_row; r < 3; ++r)
        if (std::fabs(aug[r][3]) > tol)
            throw singular_error("bracket leaves the span of a degenerate frame");
    Vec3 c{};
    for (int col = 0; col < 3; ++col)
        if (pivot_row_of[col] >= 0)
            c[col] = aug[pivot_row_of[col]][3] / aug[pivot_row_of[col]][col];
    return c;
}

} // namespace detail

inline std::array<double, 5> compatibility_polynomial(const std::array<VectorField, 3>& frame,
                                                      const Vec3& p)
{
    Mat3 M;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) M[i][j] = frame[j].comp[i].value(p);
    bool zero_frame = true;
    for (int i = 0; i < 3 && zero_frame; ++i)
        for (int j = 0; j < 3; ++j) zero_frame = zero_frame && M[i][j] == 0.0;
    if (zero_frame) throw singular_error("frame is degenerate at the probe point");
    const Vec3 c01 = detail::expand_in_columns(M, lie_bracket(frame[0], frame[1], p));
    const Vec3 c02 = detail::expand_in_columns(M, lie_bracket(frame[0], frame[2], p));
    const Vec3 c12 = detail::expand_in_columns(M, lie_bracket(frame[1], frame[2], p));
    return {c12[0], c12[1] - c02[0], c01[0] - c02[1] + c12[2], c01[1] - c02[2], c01[2]};
}

// ---------------------------------------------------------------------------
// Exact solution library
// ---------------------------------------------------------------------------

enum class SolutionTag { A0, A1, B0, C0, D0 };

inline const char* to_string(SolutionTag t)
{
    switch (t) {
        case SolutionTag::A0: return "A0";
        case SolutionTag::A1: return "A1";
        case SolutionTag::B0: return "B0";
        case SolutionTag::C0: return "C0";
        case SolutionTag::D0: return "D0";
    }
    return "?";
}

struct ExactSolutionCase {
    SolutionTag tag;
    std::array<ScalarField, 3> chart; // original coordinates -> adapted chart
    std::function<bool(const Vec3&)> chart_domain; // on original coordinates
    ScalarField solution;                          // function of chart coordinates
    EquationSpec spec;                             // equation it solves, in chart coordinates
    Box3 probe_box;                                // chart-coordinate probe region
    PoleGauge pole;                                // gauge on chart coordinates, may be empty
    std::string note;

    ScalarField solution_in_original_chart() const { return pullback(solution, chart); }
};

namespace detail {

inline std::function<bool(const Vec3&)> ordered_domain(double margin = 1e-3)
{
    return [margin](const Vec3& p) {
        return p[0] - p[1] > margin && p[1] - p[2] > margin;
    };
}

} // namespace detail

inline ExactSolutionCase exact_solution(SolutionTag tag)
{
    ExactSolutionCase c;
    c.tag = tag;
    c.chart_domain = detail::ordered_domain();
    const ScalarField x1 = coordinate_field(1), x2 = coordinate_field(2), x3 = coordinate_field(3);
    switch (tag) {
        case SolutionTag::A0: {
            c.chart = {x1, x2, x3};
            c.solution = parse_field("(x3-x2)/(x1-x2)");
            c.spec = equation_from_tag(NormalFormTag::A0);
            c.probe_box = {{2.5, 1.5, 0.5}, {3.5, 2.5, 1.5}};
            c.pole = [](const Vec3& p) {
                return std::min({std::fabs(p[0] - p[1]), std::fabs(p[1] - p[2]),
                                 std::fabs(p[0] - p[2])});
            };
            break;
        }
        case SolutionTag::A1: {
            const double lam3 = 0.0; // constant third spectral value
            c.chart = {x1, x2, (x3 - x2) * (x1 - lam3) / ((x1 - x2) * (x3 - lam3))};
            // F(x, infinity) in the chart: (lam3 - y2) y3 / ((y1-y2) y3 - (y1-lam3))
            c.solution = (constant_field(lam3) - x2) * x3 /
                         ((x1 - x2) * x3 - (x1 - constant_field(lam3)));
            c.spec = equation_from_tag(NormalFormTag::A1, 0.0, 0.0, lam3);
            c.probe_box = {{2.5, 1.5, -4.0}, {3.5, 2.5, -2.0}};
            c.pole = [lam3](const Vec3& p) {
                const double den = (p[0] - p[1]) * p[2] - (p[0] - lam3);
                return std::min({std::fabs(p[0] - p[1]), std::fabs(p[0] - lam3),
                                 std::fabs(p[1] - lam3), std::fabs(den), std::fabs(p[2])});
            };
            break;
        }
        case SolutionTag::B0: {
            c.chart = {ln_field((x1 - x2) * (x2 - x3) / (x1 - x3)), x2, x3};
            c.solution = parse_field("1 - x2*exp(-x1) + x3*exp(-x1)");
            c.spec = equation_from_tag(NormalFormTag::B0);
            c.probe_box = {{-1.0, 1.5, 0.5}, {0.0, 2.5, 1.4}};
            c.pole = [](const Vec3& p) { return std::fabs(p[1] - p[2]); };
            break;
        }
        case SolutionTag::C0: {
            // Chart ordered for the family-C variable roles: the reciprocal
            // eigen-parameter comes first, the logarithmic coordinate second.
            c.chart = {constant_field(1.0) / (x1 - x3),
                       ln_field((x1 - x3) * (x2 - x3) / (x1 - x2)), x3};
            c.solution = parse_field("x1*exp(x2)");
            c.spec = equation_from_tag(NormalFormTag::C0);
            c.probe_box = {{0.3, 0.4, 0.5}, {0.7, 1.0, 1.5}};
            c.note = "composite equals (x2-x3)/(x1-x2), the negative of the A0 value";
            break;
        }
        case SolutionTag::D0: {
            const auto pair = sl2_self_propelled_pair();
            c.chart = {pair[0], pair[1], x3};
            c.solution = parse_field("(x1-x2-x3)/x2");
            c.spec = equation_from_tag(NormalFormTag::D0);
            c.probe_box = {{1.5, 0.3, 0.5}, {2.2, 0.5, 1.5}};
            c.pole = [](const Vec3& p) { return std::fabs(p[1]); };
            c.note = "composite equals (x2-x3)/(x1-x2), the negative of the A0 value";
            break;
        }
    }
    return c;
}

inline std::vector<SolutionTag> all_solution_tags()
{
    return {SolutionTag::A0, SolutionTag::A1, SolutionTag::B0, SolutionTag::C0, SolutionTag::D0};
}

} // namespace veronese
