#pragma once

// Weyl structures (g, omega) attached to candidate solutions of equation A,
// the "universal" one-form recovered from the metric alone, and the
// Einstein-Weyl residual: the trace-free part of the symmetrized Ricci tensor
// of the Weyl connection
//
//   Gamma^k_ij = LC(g)^k_ij - (omega_i d^k_j + omega_j d^k_i - g_ij omega^k)/2,
//
// the sign fixed by the checkable identity  nabla g = omega (x) g.
// Curvature comes from jets of the Christoffel fields; no finite differences.

#include <veronese/field.hpp>

#include <array>

namespace veronese {

using MetricField = std::array<std::array<ScalarField, 3>, 3>;

struct WeylStructure {
    MetricField g; // symmetric tensor components
    OneFormField omega;
};

namespace detail {

inline ScalarField metric_det(const MetricField& m)
{
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

inline MetricField metric_adjugate(const MetricField& m)
{
    MetricField a;
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

inline MetricField metric_inverse_fields(const MetricField& m)
{
    const MetricField adj = metric_adjugate(m);
    const ScalarField d = metric_det(m);
    MetricField inv;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) inv[i][j] = adj[i][j] / d;
    return inv;
}

} // namespace detail

// Metric and connection form of the Weyl structure carried by a candidate
// solution f of equation A with parameters l_i(x_i):
//   g_ii = (l_j - l_k)^2 f_i / (f_j f_k)
//   quadratic form cross term  2 (l_i - l_k)(l_j - l_k) / f_k  dx_i dx_j
//   omega_i = (1/(l_i-l_j) + 1/(l_i-l_k)) l_i'
//             - l_j' f_i / ((l_i-l_j) f_j) - l_k' f_i / ((l_i-l_k) f_k)
//             - f_ii / f_i .
inline WeylStructure assemble_weyl_A(const ScalarField& l1, const ScalarField& l2,
                                     const ScalarField& l3, const ScalarField& f)
{
    const std::array<ScalarField, 3> l{l1, l2, l3};
    std::array<ScalarField, 3> lp;
    for (int i = 0; i < 3; ++i) lp[i] = derivative_field(l[i], i + 1);
    std::array<ScalarField, 3> df;
    for (int i = 0; i < 3; ++i) df[i] = derivative_field(f, i + 1);

    WeylStructure W;
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        const ScalarField dl = l[j] - l[k];
        W.g[i][i] = dl * dl * df[i] / (df[j] * df[k]);
    }
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const int k = 3 - i - j;
            // tensor component = half the displayed dx_i dx_j coefficient
            W.g[i][j] = (l[i] - l[k]) * (l[j] - l[k]) / df[k];
            W.g[j][i] = W.g[i][j];
        }
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        const ScalarField one = constant_field(1.0);
        W.omega.coeff[i] = (one / (l[i] - l[j]) + one / (l[i] - l[k])) * lp[i] -
                           (df[i] / ((l[i] - l[j]) * df[j])) * lp[j] -
                           (df[i] / ((l[i] - l[k]) * df[k])) * lp[k] -
                           derivative_field(df[i], i + 1) / df[i];
    }
    return W;
}

// Christoffel symbols of the Weyl connection as fields, Gamma[k][i][j].
inline std::array<MetricField, 3> weyl_christoffel_fields(const WeylStructure& W)
{
    const MetricField ginv = detail::metric_inverse_fields(W.g);
    std::array<std::array<std::array<ScalarField, 3>, 3>, 3> dg; // dg[l][i][j] = D_l g_ij
    for (int l = 0; l < 3; ++l)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) dg[l][i][j] = derivative_field(W.g[i][j], l + 1);

    std::array<ScalarField, 3> omega_up;
    for (int k = 0; k < 3; ++k) {
        ScalarField acc = constant_field(0.0);
        for (int l = 0; l < 3; ++l) acc = acc + ginv[k][l] * W.omega.coeff[l];
        omega_up[k] = acc;
    }

    std::array<MetricField, 3> gamma;
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                ScalarField lc = constant_field(0.0);
                for (int l = 0; l < 3; ++l)
                    lc = lc + ginv[k][l] * (dg[i][l][j] + dg[j][i][l] - dg[l][i][j]);
                ScalarField corr = W.g[i][j] * omega_up[k];
                if (k == j) corr = corr - W.omega.coeff[i];
                if (k == i) corr = corr - W.omega.coeff[j];
                gamma[k][i][j] = 0.5 * lc + 0.5 * corr;
            }
    return gamma;
}

// max-norm of the trace-free part of the symmetrized Ricci tensor of the
// Weyl connection at p; zero exactly when Einstein-Weyl holds there.
inline double einstein_weyl_residual(const WeylStructure& W, const Vec3& p)
{
    const auto gamma = weyl_christoffel_fields(W);

    double gval[3][3][3];  // Gamma^k_ij at p
    double dgam[3][3][3][3]; // D_m Gamma^k_ij at p
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const Jet3 jet = gamma[k][i][j](p);
                gval[k][i][j] = jet.value;
                for (int m = 0; m < 3; ++m) dgam[m][k][i][j] = jet.grad[m];
            }

    // Ric_jl = D_k Gamma^k_jl - D_j Gamma^k_kl
    //          + Gamma^k_km Gamma^m_jl - Gamma^k_jm Gamma^m_kl
    Mat3 ric{};
    for (int j = 0; j < 3; ++j)
        for (int l = 0; l < 3; ++l) {
            double r = 0.0;
            for (int k = 0; k < 3; ++k) r += dgam[k][k][j][l] - dgam[j][k][k][l];
            for (int k = 0; k < 3; ++k)
                for (int m = 0; m < 3; ++m)
                    r += gval[k][k][m] * gval[m][j][l] - gval[k][j][m] * gval[m][k][l];
            ric[j][l] = r;
        }

    Mat3 sym;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) sym[i][j] = 0.5 * (ric[i][j] + ric[j][i]);

    Mat3 gp;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) gp[i][j] = W.g[i][j].value(p);
    const Mat3 ginv = inverse(gp);
    double trace = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) trace += ginv[i][j] * sym[i][j];

    Mat3 tracefree;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) tracefree[i][j] = sym[i][j] - (trace / 3.0) * gp[i][j];
    return max_abs(tracefree);
}

// max-norm of nabla_k g_ij - omega_k g_ij at p; pins the connection and sign
// conventions.
inline double weyl_compatibility_residual(const WeylStructure& W, const Vec3& p)
{
    const auto gamma = weyl_christoffel_fields(W);
    double gval[3][3][3];
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) gval[k][i][j] = gamma[k][i][j].value(p);
    Mat3 gp;
    Mat3 dgp[3]; // dgp[k][i][j] = D_k g_ij
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const Jet3 jet = W.g[i][j](p);
            gp[i][j] = jet.value;
            for (int k = 0; k < 3; ++k) dgp[k][i][j] = jet.grad[k];
        }
    const Vec3 om = W.omega(p);
    double worst = 0.0;
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double nab = dgp[k][i][j];
                for (int l = 0; l < 3; ++l)
                    nab -= gval[l][k][i] * gp[l][j] + gval[l][k][j] * gp[i][l];
                worst = std::max(worst, std::fabs(nab - om[k] * gp[i][j]));
            }
    return worst;
}

// omega_k = 2 g_kj D_l(g^{lj}) + D_k log det(g), recovered from the metric
// alone.  The log-derivative is computed as (D_k det)/det so an indefinite
// signature is fine.
inline Vec3 universal_omega(const MetricField& g, const Vec3& p)
{
    const MetricField ginv = detail::metric_inverse_fields(g);
    const ScalarField d = detail::metric_det(g);
    const Jet3 dj = d(p);
    if (dj.value == 0.0) throw singular_error("metric is singular at p");

    Mat3 gp;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) gp[i][j] = g[i][j].value(p);
    double div[3]; // div[j] = sum_l D_l g^{lj}
    for (int j = 0; j < 3; ++j) {
        double acc = 0.0;
        for (int l = 0; l < 3; ++l) acc += ginv[l][j](p).grad[l];
        div[j] = acc;
    }
    Vec3 om;
    for (int k = 0; k < 3; ++k) {
        double acc = 0.0;
        for (int j = 0; j < 3; ++j) acc += gp[k][j] * div[j];
        om[k] = 2.0 * acc + dj.grad[k] / dj.value;
    }
    return om;
}

} // namespace veronese
