#include <veronese/expr.hpp>
#include <veronese/nijenhuis.hpp>
#include <veronese/solutions.hpp>

#include <doctest.h>

using namespace veronese;

namespace {

const Box3 kPoleFreeBox{{0.5, 1.6, 2.7}, {1.4, 2.5, 3.6}};

double worst_coordinate_nijenhuis(const OperatorField& J, const Vec3& p)
{
    double worst = 0.0;
    for (int i = 1; i <= 3; ++i)
        for (int j = i + 1; j <= 3; ++j)
            worst = std::max(worst, max_abs(nijenhuis_tensor(J, coordinate_vector_field(i),
                                                             coordinate_vector_field(j), p)));
    return worst;
}

} // namespace

TEST_SUITE("nijenhuis")
{
    TEST_CASE("normal form matrices at sample points")
    {
        const Mat3 a0 = normal_form_operator({NormalFormTag::A0})({1, 2, 3});
        CHECK(a0[0][0] == 1.0);
        CHECK(a0[1][1] == 2.0);
        CHECK(a0[2][2] == 3.0);
        CHECK(a0[0][1] == 0.0);

        const Mat3 d0 = normal_form_operator({NormalFormTag::D0})({1, 2, 3});
        CHECK(d0[0][0] == 1.0);
        CHECK(d0[0][1] == -2.0);
        CHECK(d0[1][0] == 2.0);
        CHECK(d0[1][1] == 1.0);
        CHECK(d0[2][2] == 3.0);
        CHECK(d0[0][2] == 0.0);

        // full Jordan family with l3(x3) = x3: the (1,2) entry is e^{x2}
        const Mat3 c = family_C_operator(coordinate_field(3))({0, 1, 2});
        CHECK(c[0][1] == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
        CHECK(c[0][0] == 2.0);
        CHECK(c[1][2] == 1.0);
        CHECK(c[1][0] == 0.0);
    }

    TEST_CASE("specialization constants are validated")
    {
        CHECK_THROWS_AS(normal_form_operator({NormalFormTag::A3, 1.0, 1.0, -3.0}), domain_error);
        NormalFormSpec d2{NormalFormTag::D2};
        d2.c2 = 0.0;
        CHECK_THROWS_AS(normal_form_operator(d2), domain_error);
    }

    TEST_CASE("nijenhuis tensor vanishes for the diagonal form")
    {
        const OperatorField J = normal_form_operator({NormalFormTag::A0});
        for (const Vec3& p : sample_pole_free(kPoleFreeBox, 5, 101))
            CHECK(worst_coordinate_nijenhuis(J, p) == 0.0);
    }

    TEST_CASE("mismatched eigenvalue slots produce the classical residual")
    {
        const OperatorField J =
            diag_operator(coordinate_field(2), coordinate_field(1), coordinate_field(3));
        const Vec3 n = nijenhuis_tensor(J, coordinate_vector_field(1), coordinate_vector_field(2),
                                        {1, 2, 3});
        CHECK(n[0] == doctest::Approx(1.0)); // (x2 - x1) at (1,2,3)
        CHECK(n[1] == doctest::Approx(1.0));
        CHECK(n[2] == 0.0);
    }

    TEST_CASE("identity operator has vanishing tensor")
    {
        const OperatorField I = operator_from_constant({{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}});
        const VectorField X{parse_field("x2^2"), parse_field("x1*x3"), parse_field("x3+1")};
        const VectorField Y{parse_field("x1+x2"), parse_field("x3^2"), parse_field("x1*x2")};
        for (const Vec3& p : sample_pole_free(kPoleFreeBox, 5, 103))
            CHECK(max_abs(nijenhuis_tensor(I, X, Y, p)) < 1e-12);
    }

    TEST_CASE("tensor is tensorial in its arguments")
    {
        const OperatorField J = normal_form_operator({NormalFormTag::B0});
        const ScalarField s = 1.0 + 0.3 * coordinate_field(2);
        const VectorField X{parse_field("x2^2"), parse_field("x1*x3"), parse_field("x3+1")};
        const VectorField Y{parse_field("x1+x2"), parse_field("x3^2"), parse_field("x1*x2")};
        for (const Vec3& p : sample_pole_free(kPoleFreeBox, 8, 107)) {
            const Vec3 lhs = nijenhuis_tensor(J, scale(s, X), Y, p);
            const Vec3 rhs = s.value(p) * nijenhuis_tensor(J, X, Y, p);
            CHECK(max_abs(lhs - rhs) < 1e-9);
        }
    }

    TEST_CASE("every specialization is a Nijenhuis operator with companion data")
    {
        for (NormalFormTag tag : all_normal_form_tags()) {
            CAPTURE(to_string(tag));
            const NormalFormSpec spec{tag};
            const OperatorField J = normal_form_operator(spec);
            for (const Vec3& p : sample_pole_free(kPoleFreeBox, 10, 109, pole_gauge(spec))) {
                CHECK(worst_coordinate_nijenhuis(J, p) < 1e-10);
                CHECK(frobenius_conjugation_residual(spec, p) < 1e-10);
            }
        }
    }

    TEST_CASE("partial residuals vanish for a solution-adapted foliation")
    {
        const OperatorField J = normal_form_operator({NormalFormTag::A0});
        const ScalarField f = parse_field("(x3-x2)/(x1-x2)");
        const VectorField X{derivative_field(f, 2), -derivative_field(f, 1), constant_field(0.0)};
        const VectorField Y{constant_field(0.0), derivative_field(f, 3), -derivative_field(f, 2)};
        const auto r = pno_residuals(J, f, X, Y, {3, 2, 1});
        CHECK(std::fabs(r.leaf_defect) < 1e-9);
        CHECK(max_abs(r.nijenhuis) < 1e-9);
    }

    TEST_CASE("partial residuals are antisymmetric in the pair")
    {
        const OperatorField J = normal_form_operator({NormalFormTag::A0});
        const ScalarField f = parse_field("(x3-x2)/(x1-x2)");
        const VectorField X{derivative_field(f, 2), -derivative_field(f, 1), constant_field(0.0)};
        const auto r = pno_residuals(J, f, X, X, {3, 2, 1});
        CHECK(r.leaf_defect == 0.0);
        CHECK(max_abs(r.nijenhuis) == 0.0);
    }

    TEST_CASE("a non-operator foliation pair leaves a residual")
    {
        const OperatorField J =
            diag_operator(coordinate_field(2), coordinate_field(1), coordinate_field(3));
        const ScalarField f = parse_field("x1+x2+x3");
        const VectorField X = constant_vector_field({1.0, -1.0, 0.0});
        const VectorField Y = constant_vector_field({0.0, 1.0, -1.0});
        const auto r = pno_residuals(J, f, X, Y, {1, 2, 3});
        CHECK(max_abs(r.nijenhuis) > 0.5);
    }

    TEST_CASE("tangency precondition is enforced")
    {
        const OperatorField J = normal_form_operator({NormalFormTag::A0});
        const ScalarField f = parse_field("x1+x2+x3");
        const VectorField X = coordinate_vector_field(1); // df(X) = 1
        CHECK_THROWS_AS(pno_residuals(J, f, X, X, {1, 2, 3}), evaluation_error);
    }

    TEST_CASE("conjugation residual at the tabulated points")
    {
        CHECK(frobenius_conjugation_residual({NormalFormTag::A0}, {1, 2, 3}) < 1e-12);
        CHECK(frobenius_conjugation_residual({NormalFormTag::B0}, {3, 2, 1}) < 1e-12);
        CHECK_THROWS_AS(frobenius_conjugation_residual({NormalFormTag::A0}, {1, 1, 3}),
                        evaluation_error);
    }

    TEST_CASE("pushforward carries the Jordan-family chart form to its specialization")
    {
        const OperatorField Jd = family_C_operator(coordinate_field(3));
        const OperatorField J0 = normal_form_operator({NormalFormTag::C0});
        ChartMap phi;
        phi.forward = {coordinate_field(2), coordinate_field(1) * exp_field(-coordinate_field(2)),
                       coordinate_field(3)};
        phi.inverse = {coordinate_field(2) * exp_field(coordinate_field(1)), coordinate_field(1),
                       coordinate_field(3)};
        CHECK(phi.roundtrip_defect({1.0, 0.5, 2.0}) < 1e-12);
        CHECK(pushforward_residual(phi, Jd, J0, {1.0, 0.5, 2.0}) < 1e-10);
    }

    TEST_CASE("pushforward along the identity")
    {
        const OperatorField A = normal_form_operator({NormalFormTag::A0});
        const OperatorField B = normal_form_operator({NormalFormTag::B0});
        CHECK(pushforward_residual(identity_chart(), A, A, {1, 2, 3}) == 0.0);
        CHECK(pushforward_residual(identity_chart(), A, B, {1, 2, 3}) > 0.5);
    }

    TEST_CASE("frame construction reproduces the diagonal operator")
    {
        const auto frame = sl2_frame();
        const OperatorField J = build_from_self_propelled(frame, coordinate_field(1),
                                                          coordinate_field(2), coordinate_field(3));
        for (const Vec3& p : sample_pole_free(kPoleFreeBox, 5, 113)) {
            const Mat3 m = J(p);
            CHECK(m[0][0] == doctest::Approx(p[0]).epsilon(1e-10));
            CHECK(m[1][1] == doctest::Approx(p[1]).epsilon(1e-10));
            CHECK(m[2][2] == doctest::Approx(p[2]).epsilon(1e-10));
            CHECK(std::fabs(m[0][1]) < 1e-10);
            CHECK(worst_coordinate_nijenhuis(J, p) < 1e-9);
        }
    }

    TEST_CASE("frame construction with constants keeps the prescribed spectrum")
    {
        const auto frame = sl2_frame();
        const OperatorField J = build_from_self_propelled(
            frame, constant_field(1.0), constant_field(2.0), constant_field(-3.0));
        for (const Vec3& p : sample_pole_free(kPoleFreeBox, 5, 127)) {
            CHECK(worst_coordinate_nijenhuis(J, p) < 1e-9);
            const Mat3 m = J(p);
            const double trace = m[0][0] + m[1][1] + m[2][2];
            const double dete = det(m);
            double second = 0.0; // sum of principal 2x2 minors
            second += m[0][0] * m[1][1] - m[0][1] * m[1][0];
            second += m[0][0] * m[2][2] - m[0][2] * m[2][0];
            second += m[1][1] * m[2][2] - m[1][2] * m[2][1];
            CHECK(trace == doctest::Approx(0.0).epsilon(1e-9)); // 1 + 2 - 3
            CHECK(second == doctest::Approx(-7.0).epsilon(1e-9));
            CHECK(dete == doctest::Approx(-6.0).epsilon(1e-9));
        }
    }

    TEST_CASE("any tuple from the web's self-propelled family builds a Nijenhuis operator")
    {
        const auto frame = sl2_frame();
        const OperatorField J = build_from_self_propelled(
            frame, sl2_self_propelled(0.3), sl2_self_propelled(1.1), sl2_self_propelled(-0.8));
        int checked = 0;
        for (const Vec3& p : sample_pole_free(kPoleFreeBox, 30, 137)) {
            try {
                CHECK(worst_coordinate_nijenhuis(J, p) < 1e-8);
                ++checked;
            } catch (const evaluation_error&) {
                // family pole at this point
            }
            if (checked >= 15) break;
        }
        CHECK(checked >= 15);
    }

    TEST_CASE("equal constant functions give the triple-eigenvalue companion column")
    {
        const double c = 0.8;
        const OperatorField F = companion_of_roots(constant_field(c), constant_field(c),
                                                   constant_field(c));
        const Mat3 m = F({0, 0, 0});
        CHECK(m[0][2] == doctest::Approx(c * c * c).epsilon(1e-15));
        CHECK(m[1][2] == doctest::Approx(-3.0 * c * c).epsilon(1e-15));
        CHECK(m[2][2] == doctest::Approx(3.0 * c).epsilon(1e-15));
        // matches the companion form of the Jordan specialization at x3 = c
        const Mat3 fc0 = companion_form({NormalFormTag::C0})({0.0, 0.0, c});
        CHECK(max_abs(mat_sub(m, fc0)) < 1e-15);
    }

    TEST_CASE("degenerate frames are rejected when probes are given")
    {
        std::array<VectorField, 3> frame{coordinate_vector_field(1), coordinate_vector_field(2),
                                         coordinate_vector_field(2)};
        SelfPropelledBuildOptions opt;
        opt.check_points = {{1.0, 2.0, 3.0}};
        CHECK_THROWS_AS(build_from_self_propelled(frame, constant_field(1.0), constant_field(2.0),
                                                  constant_field(3.0), opt),
                        evaluation_error);
    }

    TEST_CASE("functions failing the transport system are rejected")
    {
        SelfPropelledBuildOptions opt;
        opt.check_points = {{1.0, 2.0, 3.0}};
        CHECK_THROWS_AS(build_from_self_propelled(sl2_frame(), parse_field("x1+x2"),
                                                  constant_field(2.0), constant_field(3.0), opt),
                        evaluation_error);
    }

    TEST_CASE("harmonic conjugacy residual")
    {
        CHECK(harmonic_conjugacy_residual(coordinate_field(1), coordinate_field(2), {1, 2, 3}) ==
              0.0);
        CHECK(harmonic_conjugacy_residual(coordinate_field(1), coordinate_field(1), {1, 2, 3}) >
              0.5);
    }

    TEST_CASE("operator annihilator is proportional to the spectral display")
    {
        const OperatorField J = diag_operator(constant_field(1.0), constant_field(2.0),
                                              constant_field(-3.0));
        const ScalarField f = parse_field("exp(x1+5*x2) + exp(x2+x3)");
        const OneFormField w = annihilator_one_form(J, f);
        for (const Vec3& p : sample_pole_free({{-0.4, -0.4, -0.4}, {0.4, 0.4, 0.4}}, 5, 131)) {
            const Vec3 df = f(p).grad;
            const Vec3 display{df[0] / 1.0, df[1] / 2.0, df[2] / -3.0};
            const Vec3 got = w(p);
            CHECK(norm(cross(got, display)) < 1e-10 * norm(got) * norm(display));
        }
    }
}
