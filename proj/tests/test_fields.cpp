#include <veronese/expr.hpp>
#include <veronese/field.hpp>
#include <veronese/nijenhuis.hpp>
#include <veronese/probe.hpp>
#include <veronese/solutions.hpp>

#include <doctest.h>

#include <random>

using namespace veronese;

TEST_SUITE("fields")
{
    TEST_CASE("lie brackets of the sl2 frame")
    {
        const auto frame = sl2_frame();
        const Vec3 p{1.0, 2.0, 3.0};
        const Vec3 b01 = lie_bracket(frame[0], frame[1], p);
        CHECK(b01[0] == doctest::Approx(1.0));
        CHECK(b01[1] == doctest::Approx(1.0));
        CHECK(b01[2] == doctest::Approx(1.0));
        const Vec3 b02 = lie_bracket(frame[0], frame[2], p);
        CHECK(b02[0] == doctest::Approx(2.0));
        CHECK(b02[1] == doctest::Approx(4.0));
        CHECK(b02[2] == doctest::Approx(6.0));
        const Vec3 b12 = lie_bracket(frame[1], frame[2], p);
        const Vec3 X2 = frame[2](p);
        for (int i = 0; i < 3; ++i) CHECK(b12[i] == doctest::Approx(X2[i]));
    }

    TEST_CASE("coordinate fields commute")
    {
        const Vec3 b = lie_bracket(coordinate_vector_field(1), coordinate_vector_field(2),
                                   {0.3, -1.0, 7.0});
        CHECK(b == Vec3{0.0, 0.0, 0.0});
    }

    TEST_CASE("bracket of x2 d1 with d2")
    {
        const VectorField X{coordinate_field(2), constant_field(0.0), constant_field(0.0)};
        const VectorField Y = coordinate_vector_field(2);
        const Vec3 b = lie_bracket(X, Y, {1.4, 0.2, -2.0});
        CHECK(b[0] == -1.0);
        CHECK(b[1] == 0.0);
        CHECK(b[2] == 0.0);
    }

    TEST_CASE("antisymmetry is exact")
    {
        const VectorField X{parse_field("x2^2"), parse_field("x1*x3"), parse_field("x3+1")};
        const VectorField Y{parse_field("x1+x2"), parse_field("x3^2"), parse_field("x1*x2")};
        for (const Vec3& p : sample_pole_free({{-2, -2, -2}, {2, 2, 2}}, 10, 5)) {
            const Vec3 a = lie_bracket(X, Y, p);
            const Vec3 b = lie_bracket(Y, X, p);
            CHECK(a[0] == -b[0]);
            CHECK(a[1] == -b[1]);
            CHECK(a[2] == -b[2]);
        }
    }

    TEST_CASE("jacobi identity residual stays small")
    {
        const VectorField X{parse_field("x2^2"), parse_field("x1*x3"), parse_field("x3+1")};
        const VectorField Y{parse_field("x1+x2"), parse_field("x3^2"), parse_field("x1*x2")};
        const VectorField Z{parse_field("x3"), parse_field("x1^2"), parse_field("x2+2")};
        for (const Vec3& p : sample_pole_free({{-2, -2, -2}, {2, 2, 2}}, 10, 7)) {
            const Vec3 r = lie_bracket(X, lie_bracket_field(Y, Z), p) +
                           lie_bracket(Y, lie_bracket_field(Z, X), p) +
                           lie_bracket(Z, lie_bracket_field(X, Y), p);
            CHECK(max_abs(r) < 1e-9);
        }
    }

    TEST_CASE("exact one-forms have zero frobenius residual")
    {
        const ScalarField f = parse_field("x1^2*x2 + exp(x3) - x2*x3");
        const OneFormField w = differential(f);
        for (const Vec3& p : sample_pole_free({{-2, -2, -2}, {2, 2, 2}}, 10, 11))
            CHECK(frobenius_residual(w, p) == 0.0);
    }

    TEST_CASE("contact-type form has residual one")
    {
        const OneFormField w{constant_field(0.0), coordinate_field(1), constant_field(1.0)};
        CHECK(frobenius_residual(w, {0.0, 0.0, 0.0}) == 1.0);
        CHECK(frobenius_residual(w, {5.0, -2.0, 1.0}) == 1.0);
    }

    TEST_CASE("spectral one-form of a web operator is integrable on solutions")
    {
        // diagonal constant spectrum: the classical display
        // omega = l1^-1 f1 dx1 + l2^-1 f2 dx2 + l3^-1 f3 dx3
        const ScalarField f = parse_field("exp(x1+5*x2) + exp(x2+x3)");
        OneFormField w{(1.0 / 1.0) * derivative_field(f, 1), (1.0 / 2.0) * derivative_field(f, 2),
                       (-1.0 / 3.0) * derivative_field(f, 3)};
        for (const Vec3& p : sample_pole_free({{-0.4, -0.4, -0.4}, {0.4, 0.4, 0.4}}, 10, 13))
            CHECK(std::fabs(frobenius_residual_scaled(w, p)) < 1e-10);

        // the same statement through the operator annihilator, for the sl2
        // web's operator with spectrum (1,2,-3) and its first integral
        const auto frame = sl2_frame();
        const OperatorField J = build_from_self_propelled(
            frame, constant_field(1.0), constant_field(2.0), constant_field(-3.0));
        const OneFormField wj = annihilator_one_form(J, parse_field("(x3-x2)/(x1-x2)"));
        for (const Vec3& p : sample_pole_free({{0.5, 1.6, 2.7}, {1.4, 2.5, 3.6}}, 10, 17))
            CHECK(std::fabs(frobenius_residual_scaled(wj, p)) < 1e-10);
    }

    TEST_CASE("frobenius residual scales quadratically under rescaling")
    {
        const ScalarField s = 1.0 + 0.1 * coordinate_field(1);
        OneFormField w{parse_field("x2*x3"), parse_field("x1+1"), parse_field("x1*x1-x2")};
        const OneFormField sw = scale(s, w);
        for (const Vec3& p : sample_pole_free({{-1, -1, -1}, {1, 1, 1}}, 10, 19)) {
            const double sv = s.value(p);
            CHECK(frobenius_residual(sw, p) ==
                  doctest::Approx(sv * sv * frobenius_residual(w, p)).epsilon(1e-9));
        }
    }

    TEST_CASE("directional derivatives on the sl2 frame")
    {
        const auto frame = sl2_frame();
        const ScalarField f = coordinate_field(1);
        const Vec3 p{1.0, 2.0, 3.0};
        CHECK(directional_derivative(frame[0], f, p) == 1.0);
        CHECK(directional_derivative(frame[1], f, p) == 1.0); // X1 f = x1 = 1
        CHECK(directional_derivative(frame[2], f, p) == 1.0); // X2 f = x1^2 = 1
    }

    TEST_CASE("pullback composes jets through third order")
    {
        // f(m(x)) with closed-form composite: f = y1*y2 + y3^2,
        // m = (x2, x1*x3, x1+x2)  =>  composite = x2*x1*x3 + (x1+x2)^2
        const ScalarField f = parse_field("x1*x2 + x3^2");
        const std::array<ScalarField, 3> m{coordinate_field(2),
                                           coordinate_field(1) * coordinate_field(3),
                                           coordinate_field(1) + coordinate_field(2)};
        const ScalarField composed = pullback(f, m);
        const ScalarField direct = parse_field("x2*x1*x3 + (x1+x2)^2");
        for (const Vec3& p : sample_pole_free({{-2, -2, -2}, {2, 2, 2}}, 10, 23)) {
            const Jet3 a = composed(p), b = direct(p);
            CHECK(a.value == doctest::Approx(b.value).epsilon(1e-13));
            for (int i = 0; i < 3; ++i)
                CHECK(a.grad[i] == doctest::Approx(b.grad[i]).epsilon(1e-13));
            for (int i = 0; i < 6; ++i)
                CHECK(a.hess[i] == doctest::Approx(b.hess[i]).epsilon(1e-13));
            for (int i = 0; i < 10; ++i)
                CHECK(a.third[i] == doctest::Approx(b.third[i]).epsilon(1e-12));
        }
    }

    TEST_CASE("derivative fields expose exact lower-order slots")
    {
        const ScalarField f = parse_field("exp(x1)*x2 + x3^3");
        const ScalarField f1 = derivative_field(f, 1);
        const Vec3 p{0.2, 1.5, -0.7};
        const Jet3 j = f(p), d = f1(p);
        CHECK(d.value == j.grad[0]);
        for (int i = 0; i < 3; ++i) CHECK(d.grad[i] == j.h(0, i));
        CHECK(d.h(1, 2) == j.t(0, 1, 2));
    }
}
