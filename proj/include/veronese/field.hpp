#pragma once

// Differentiable scalar / vector / one-form fields on a 3D chart.  A field is
// a closure mapping a point to its Jet3; algebraic combinations compose the
// jets, so derivatives of composite fields stay exact through the orders the
// ingredients carry.  Fields are immutable after construction and evaluation
// is pure.

#include <veronese/jet.hpp>

#include <functional>
#include <memory>
#include <string>
#include <utility>

namespace veronese {

class ScalarField {
  public:
    using Evaluator = std::function<Jet3(const Vec3&)>;

    ScalarField() = default;

    explicit ScalarField(Evaluator eval, std::string text = {})
        : eval_(std::make_shared<Evaluator>(std::move(eval))), text_(std::move(text))
    {}

    Jet3 operator()(const Vec3& p) const { return (*eval_)(p); }
    double value(const Vec3& p) const { return (*eval_)(p).value; }
    Vec3 gradient(const Vec3& p) const { return (*eval_)(p).grad; }

    bool valid() const { return static_cast<bool>(eval_); }
    const std::string& text() const { return text_; }

  private:
    // shared so that copies of composite fields share subtrees
    std::shared_ptr<const Evaluator> eval_;
    std::string text_;
};

inline ScalarField constant_field(double c)
{
    return ScalarField([c](const Vec3&) { return jet_constant(c); }, std::to_string(c));
}

// Coordinate function x_axis, axis in 1..3.
inline ScalarField coordinate_field(int axis)
{
    if (axis < 1 || axis > 3) throw domain_error("coordinate axis out of range", axis);
    return ScalarField([axis](const Vec3& p) { return jet_coordinate(axis, p); },
                       "x" + std::to_string(axis));
}

inline ScalarField operator+(const ScalarField& a, const ScalarField& b)
{
    return ScalarField([a, b](const Vec3& p) { return a(p) + b(p); });
}

inline ScalarField operator-(const ScalarField& a, const ScalarField& b)
{
    return ScalarField([a, b](const Vec3& p) { return a(p) - b(p); });
}

inline ScalarField operator-(const ScalarField& a)
{
    return ScalarField([a](const Vec3& p) { return -a(p); });
}

inline ScalarField operator*(const ScalarField& a, const ScalarField& b)
{
    return ScalarField([a, b](const Vec3& p) { return a(p) * b(p); });
}

inline ScalarField operator/(const ScalarField& a, const ScalarField& b)
{
    return ScalarField([a, b](const Vec3& p) { return a(p) / b(p); });
}

inline ScalarField operator*(double s, const ScalarField& a)
{
    return ScalarField([s, a](const Vec3& p) { return s * a(p); });
}

inline ScalarField operator*(const ScalarField& a, double s) { return s * a; }

inline ScalarField operator+(const ScalarField& a, double s)
{
    return ScalarField([s, a](const Vec3& p) { return a(p) + s; });
}

inline ScalarField operator+(double s, const ScalarField& a) { return a + s; }

inline ScalarField operator-(const ScalarField& a, double s) { return a + (-s); }

inline ScalarField operator-(double s, const ScalarField& a)
{
    return ScalarField([s, a](const Vec3& p) { return s - a(p); });
}

inline ScalarField operator/(const ScalarField& a, double s)
{
    if (s == 0.0) throw domain_error("division by zero", s);
    return (1.0 / s) * a;
}

inline ScalarField operator/(double s, const ScalarField& a)
{
    return ScalarField([s, a](const Vec3& p) { return s / a(p); });
}

inline ScalarField exp_field(const ScalarField& a)
{
    return ScalarField([a](const Vec3& p) { return jet_exp(a(p)); });
}

inline ScalarField ln_field(const ScalarField& a)
{
    return ScalarField([a](const Vec3& p) { return jet_ln(a(p)); });
}

inline ScalarField sqrt_field(const ScalarField& a)
{
    return ScalarField([a](const Vec3& p) { return jet_sqrt(a(p)); });
}

inline ScalarField ipow_field(const ScalarField& a, int n)
{
    return ScalarField([a, n](const Vec3& p) { return jet_ipow(a(p), n); });
}

// Partial derivative of a field as a field.  The result's value, gradient and
// Hessian come from the argument's gradient, Hessian and third slots; its own
// third slots are not representable at this truncation order and are zero.
// Consumers must only rely on the orders that are exact.
inline ScalarField derivative_field(const ScalarField& f, int axis)
{
    if (axis < 1 || axis > 3) throw domain_error("derivative axis out of range", axis);
    const int a = axis - 1;
    return ScalarField([f, a](const Vec3& p) {
        const Jet3 j = f(p);
        Jet3 r;
        r.value = j.grad[a];
        for (int i = 0; i < 3; ++i) r.grad[i] = j.h(a, i);
        for (int i = 0; i < 3; ++i)
            for (int k = i; k < 3; ++k) r.h(i, k) = j.t(a, i, k);
        return r;
    });
}

struct VectorField {
    std::array<ScalarField, 3> comp;

    Vec3 operator()(const Vec3& p) const
    {
        return {comp[0].value(p), comp[1].value(p), comp[2].value(p)};
    }
};

struct OneFormField {
    std::array<ScalarField, 3> coeff; // coefficients of dx1, dx2, dx3

    Vec3 operator()(const Vec3& p) const
    {
        return {coeff[0].value(p), coeff[1].value(p), coeff[2].value(p)};
    }

    double pair_with(const VectorField& X, const Vec3& p) const
    {
        return dot((*this)(p), X(p));
    }
};

inline VectorField constant_vector_field(const Vec3& v)
{
    return {constant_field(v[0]), constant_field(v[1]), constant_field(v[2])};
}

inline VectorField coordinate_vector_field(int axis)
{
    Vec3 e{};
    e[axis - 1] = 1.0;
    return constant_vector_field(e);
}

inline OneFormField differential(const ScalarField& f)
{
    return {derivative_field(f, 1), derivative_field(f, 2), derivative_field(f, 3)};
}

inline VectorField scale(const ScalarField& s, const VectorField& X)
{
    return {s * X.comp[0], s * X.comp[1], s * X.comp[2]};
}

inline OneFormField scale(const ScalarField& s, const OneFormField& w)
{
    return {s * w.coeff[0], s * w.coeff[1], s * w.coeff[2]};
}

// [X,Y](p) = (X.grad)Y - (Y.grad)X from the component jets.
inline Vec3 lie_bracket(const VectorField& X, const VectorField& Y, const Vec3& p)
{
    std::array<Jet3, 3> xj, yj;
    for (int i = 0; i < 3; ++i) {
        xj[i] = X.comp[i](p);
        yj[i] = Y.comp[i](p);
    }
    Vec3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r[i] += xj[j].value * yj[i].grad[j] - yj[j].value * xj[i].grad[j];
    return r;
}

// Same bracket as a field, for residuals that need one more derivative.
inline VectorField lie_bracket_field(const VectorField& X, const VectorField& Y)
{
    VectorField r;
    for (int i = 0; i < 3; ++i) {
        ScalarField c = constant_field(0.0);
        for (int j = 0; j < 3; ++j)
            c = c + X.comp[j] * derivative_field(Y.comp[i], j + 1) -
                Y.comp[j] * derivative_field(X.comp[i], j + 1);
        r.comp[i] = c;
    }
    return r;
}

inline double directional_derivative(const VectorField& X, const ScalarField& f, const Vec3& p)
{
    return dot(X(p), f(p).grad);
}

// X(f) as a field.
inline ScalarField directional_derivative_field(const VectorField& X, const ScalarField& f)
{
    ScalarField r = constant_field(0.0);
    for (int j = 0; j < 3; ++j) r = r + X.comp[j] * derivative_field(f, j + 1);
    return r;
}

// Coefficient of d(omega) ^ omega against dx1^dx2^dx3.  Zero exactly when the
// plane field ker(omega) is integrable at p.
inline double frobenius_residual(const OneFormField& w, const Vec3& p)
{
    std::array<Jet3, 3> c;
    for (int i = 0; i < 3; ++i) c[i] = w.coeff[i](p);
    const double d12 = c[1].grad[0] - c[0].grad[1]; // coefficient of dx1^dx2
    const double d13 = c[2].grad[0] - c[0].grad[2];
    const double d23 = c[2].grad[1] - c[1].grad[2];
    return d12 * c[2].value - d13 * c[1].value + d23 * c[0].value;
}

// frobenius_residual divided by the squared Euclidean norm of the coefficient
// vector; invariant under constant rescaling of omega.
inline double frobenius_residual_scaled(const OneFormField& w, const Vec3& p)
{
    const Vec3 c = w(p);
    const double n2 = dot(c, c);
    if (n2 == 0.0) throw domain_error("one-form vanishes at probe point", 0.0);
    return frobenius_residual(w, p) / n2;
}

// f composed with a chart triple: (f o m)(x) = f(m1(x), m2(x), m3(x)).
// Chain rule through degree 3: treat f's jet at the image point as a cubic
// polynomial in the zero-value shifted component jets.
inline ScalarField pullback(const ScalarField& f, const std::array<ScalarField, 3>& m)
{
    return ScalarField([f, m](const Vec3& p) {
        std::array<Jet3, 3> u;
        Vec3 q;
        for (int i = 0; i < 3; ++i) {
            u[i] = m[i](p);
            q[i] = u[i].value;
            u[i].value = 0.0;
        }
        const Jet3 F = f(q);
        Jet3 r = jet_constant(F.value);
        for (int a = 0; a < 3; ++a) r = r + F.grad[a] * u[a];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                const double c = F.h(a, b);
                if (c != 0.0) r = r + (0.5 * c) * (u[a] * u[b]);
            }
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int d = 0; d < 3; ++d) {
                    const double c = F.t(a, b, d);
                    if (c != 0.0) r = r + (c / 6.0) * (u[a] * u[b] * u[d]);
                }
        return r;
    });
}

// A diffeomorphism between charts, stored as forward and inverse component
// triples.  Only the components actually used by an operation need to be
// exact; round-trip consistency can be probed with roundtrip_defect.
struct ChartMap {
    std::array<ScalarField, 3> forward;
    std::array<ScalarField, 3> inverse;

    Vec3 operator()(const Vec3& p) const
    {
        return {forward[0].value(p), forward[1].value(p), forward[2].value(p)};
    }

    Mat3 jacobian(const Vec3& p) const
    {
        Mat3 J;
        for (int i = 0; i < 3; ++i) J[i] = forward[i](p).grad;
        return J;
    }

    double roundtrip_defect(const Vec3& p) const
    {
        Vec3 q = (*this)(p);
        Vec3 back{inverse[0].value(q), inverse[1].value(q), inverse[2].value(q)};
        return norm(back - p);
    }
};

inline ChartMap identity_chart()
{
    std::array<ScalarField, 3> id{coordinate_field(1), coordinate_field(2), coordinate_field(3)};
    return {id, id};
}

} // namespace veronese
