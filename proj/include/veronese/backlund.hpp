#pragma once

// Backlund transformation between equation A with spectral triple lambda and
// the same equation with triple Lambda.  The linking first-order system is
//
//   lambda1 Lambda2 f_x1 F_x2 = lambda2 Lambda1 f_x2 F_x1,
//   lambda1 Lambda3 f_x1 F_x3 = lambda3 Lambda1 f_x3 F_x1,
//
// equivalently grad F is proportional to (phi_i f_xi) with phi_i =
// lambda_i / Lambda_i.  Both triples must have zero mean, nonzero pairwise
// distinct entries, and each ratio phi_j may depend on x_j only.  The
// transform itself is computed by reconstructing a first integral of
// ker(omega), omega = sum phi_i f_xi dx_i.

#include <veronese/field.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace veronese {

struct BacklundData {
    std::array<ScalarField, 3> lambda; // source triple
    std::array<ScalarField, 3> Lambda; // target triple
    std::array<ScalarField, 3> phi;    // ratios lambda_i / Lambda_i
    double lambda_shift = 0.0;         // mean removed from a constant source triple
    double Lambda_shift = 0.0;
    bool contains_zero = false; // a shifted entry vanished; probe away from that spectral value
    std::string note;

    // Constant triples are mean-shifted to satisfy the zero-mean hypothesis;
    // the shift is recorded.  A zero entry after shifting is flagged, not
    // fatal, except in the target triple where the ratios would be undefined.
    static BacklundData from_constants(const Vec3& src, const Vec3& dst)
    {
        const double ms = (src[0] + src[1] + src[2]) / 3.0;
        const double md = (dst[0] + dst[1] + dst[2]) / 3.0;
        Vec3 l = src - Vec3{ms, ms, ms};
        Vec3 L = dst - Vec3{md, md, md};
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                if (l[i] == l[j]) throw domain_error("source triple entries must be distinct", l[i]);
                if (L[i] == L[j]) throw domain_error("target triple entries must be distinct", L[i]);
            }
        BacklundData d;
        d.lambda_shift = ms;
        d.Lambda_shift = md;
        for (int i = 0; i < 3; ++i) {
            if (std::fabs(L[i]) < 1e-9)
                throw domain_error("target triple entry vanishes after mean shift", L[i]);
            if (std::fabs(l[i]) < 1e-9) {
                d.contains_zero = true;
                d.note = "source entry " + std::to_string(i + 1) +
                         " vanishes after mean shift; keep probes away from that foliation";
            }
            d.lambda[i] = constant_field(l[i]);
            d.Lambda[i] = constant_field(L[i]);
            d.phi[i] = constant_field(l[i] / L[i]);
        }
        return d;
    }

    // Field triples are accepted as given; the zero-mean and ratio-locality
    // hypotheses are checked at the probe points.
    static BacklundData from_fields(std::array<ScalarField, 3> src, std::array<ScalarField, 3> dst,
                                    const std::vector<Vec3>& probes)
    {
        BacklundData d;
        d.lambda = std::move(src);
        d.Lambda = std::move(dst);
        for (int i = 0; i < 3; ++i) d.phi[i] = d.lambda[i] / d.Lambda[i];
        for (const Vec3& p : probes) {
            double suml = 0.0, sumL = 0.0;
            for (int i = 0; i < 3; ++i) {
                suml += d.lambda[i].value(p);
                sumL += d.Lambda[i].value(p);
            }
            if (std::fabs(suml) > 1e-12 || std::fabs(sumL) > 1e-12)
                throw domain_error("triples must have zero mean", suml);
            for (int j = 0; j < 3; ++j) {
                const Jet3 r = d.phi[j](p);
                for (int i = 0; i < 3; ++i)
                    if (i != j && std::fabs(r.grad[i]) > 1e-10)
                        throw domain_error("ratio lambda_j/Lambda_j may depend on x_j only",
                                           r.grad[i]);
            }
        }
        return d;
    }
};

// Defects of the two linking equations at p.
inline std::array<double, 2> pair_residual(const BacklundData& d, const ScalarField& f,
                                           const ScalarField& F, const Vec3& p)
{
    const Vec3 df = f(p).grad;
    const Vec3 dF = F(p).grad;
    const double l1 = d.lambda[0].value(p), l2 = d.lambda[1].value(p), l3 = d.lambda[2].value(p);
    const double L1 = d.Lambda[0].value(p), L2 = d.Lambda[1].value(p), L3 = d.Lambda[2].value(p);
    return {l1 * L2 * df[0] * dF[1] - l2 * L1 * df[1] * dF[0],
            l1 * L3 * df[0] * dF[2] - l3 * L1 * df[2] * dF[0]};
}

// omega = phi1 f_x1 dx1 + phi2 f_x2 dx2 + phi3 f_x3 dx3; closed-kernel exactly
// when f solves equation A with the source triple.
inline OneFormField transform_one_form(const BacklundData& d, const ScalarField& f)
{
    OneFormField w;
    for (int i = 0; i < 3; ++i) w.coeff[i] = d.phi[i] * derivative_field(f, i + 1);
    return w;
}

// Value at p of the first integral F of ker(omega) normalized by F(base) = 0.
//
// The leaf through p is followed to the transversal line base + t d, with
// d = phi(base), by lifting the straight segment from p to base inside the
// leaves: the lift stays of the form x(s) = segment(s) + tau(s) d, and
// omega(dx/ds) = 0 reduces to the scalar ODE
//     tau'(s) = -omega(x)(segment') / omega(x)(d),
// integrated with fixed-step fourth-order Runge-Kutta (`steps` steps).  The
// leaf label is the line integral of omega along the transversal up to the
// intersection, so for closed omega the value is exactly int_base^p omega.
inline double integrate_transform(const BacklundData& d, const ScalarField& f, const Vec3& base,
                                  const Vec3& p, int steps)
{
    if (steps < 1) throw domain_error("step count must be positive", steps);
    const OneFormField w = transform_one_form(d, f);
    Vec3 dir;
    for (int i = 0; i < 3; ++i) dir[i] = d.phi[i].value(base);
    const Vec3 seg = base - p;

    auto slope = [&](double s, double tau) {
        const Vec3 x = p + s * seg + tau * dir;
        const Vec3 wv = w(x);
        const double across = dot(wv, dir);
        if (std::fabs(across) < 1e-14 * (1.0 + norm(wv)))
            throw singular_error("one-form degenerates along the transversal direction");
        return -dot(wv, seg) / across;
    };

    double tau = 0.0;
    const double h = 1.0 / steps;
    for (int k = 0; k < steps; ++k) {
        const double s = k * h;
        const double k1 = slope(s, tau);
        const double k2 = slope(s + 0.5 * h, tau + 0.5 * h * k1);
        const double k3 = slope(s + 0.5 * h, tau + 0.5 * h * k2);
        const double k4 = slope(s + h, tau + h * k3);
        tau += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(tau)) throw convergence_error("leaf tracing diverged");
    }

    // arc label: integral of omega along the transversal, composite Simpson
    const int panels = std::max(steps, 16);
    auto along = [&](double t) { return dot(w(base + t * dir), dir); };
    const double ht = tau / panels;
    double integral = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double t0 = k * ht;
        integral += ht / 6.0 * (along(t0) + 4.0 * along(t0 + 0.5 * ht) + along(t0 + ht));
    }
    return integral;
}

} // namespace veronese
