#include <veronese/backlund.hpp>
#include <veronese/expr.hpp>
#include <veronese/probe.hpp>
#include <veronese/webs.hpp>

#include <doctest.h>

using namespace veronese;

namespace {

// solves a f1 f23 + b f2 f13 + c f3 f12 = 0 with coefficients (1, 2, -3)
ScalarField source_solution() { return parse_field("exp(x1+x2) + exp(3*x2+x3)"); }

} // namespace

TEST_SUITE("backlund")
{
    TEST_CASE("constant triples are mean-shifted and validated")
    {
        const BacklundData d = BacklundData::from_constants({2, 3, -2}, {4, 0, -1});
        CHECK(d.lambda_shift == doctest::Approx(1.0));
        CHECK(d.Lambda_shift == doctest::Approx(1.0));
        CHECK(d.lambda[0].value({0, 0, 0}) == doctest::Approx(1.0));
        CHECK(d.Lambda[2].value({0, 0, 0}) == doctest::Approx(-2.0));
        CHECK_FALSE(d.contains_zero);

        CHECK_THROWS_AS(BacklundData::from_constants({1, 1, -2}, {3, -1, -2}), domain_error);
        // target entry hitting zero after the shift is fatal
        CHECK_THROWS_AS(BacklundData::from_constants({1, 2, -3}, {2, 1, 0}), domain_error);
        // source entry hitting zero is only flagged
        const BacklundData z = BacklundData::from_constants({1, 2, 0}, {3, -1, -2});
        CHECK(z.contains_zero);
        CHECK_FALSE(z.note.empty());
    }

    TEST_CASE("field triples must satisfy the ratio-locality hypothesis")
    {
        const std::array<ScalarField, 3> src{coordinate_field(1), coordinate_field(2),
                                             -(coordinate_field(1) + coordinate_field(2))};
        const std::array<ScalarField, 3> bad_dst{coordinate_field(2), coordinate_field(1),
                                                 -(coordinate_field(1) + coordinate_field(2))};
        CHECK_THROWS_AS(BacklundData::from_fields(src, bad_dst, {{1.0, 2.0, 3.0}}), domain_error);
        // proportional triples have constant ratios and pass
        std::array<ScalarField, 3> dst;
        for (int i = 0; i < 3; ++i) dst[i] = 2.0 * src[i];
        CHECK_NOTHROW(BacklundData::from_fields(src, dst, {{1.0, 2.0, 3.0}, {0.4, 0.2, 1.0}}));
    }

    TEST_CASE("identity data and the worked linear pair")
    {
        const BacklundData id = BacklundData::from_constants({1, 2, -3}, {1, 2, -3});
        const ScalarField f = parse_field("x1+x2+x3");
        const auto r0 = pair_residual(id, f, f, {0.7, -0.3, 2.0});
        CHECK(r0[0] == 0.0);
        CHECK(r0[1] == 0.0);

        const BacklundData d = BacklundData::from_constants({1, 2, -3}, {3, -1, -2});
        const ScalarField F = parse_field("x1/3 - 2*x2 + 3*x3/2");
        const auto r = pair_residual(d, f, F, {1, 1, 1});
        CHECK(r[0] == 0.0);
        CHECK(r[1] == 0.0);
        // both endpoints solve their equations outright
        CHECK(pde_residual(EquationSpec::hirota(1, 2, -3), f, {1, 1, 1}) == 0.0);
        CHECK(pde_residual(EquationSpec::hirota(3, -1, -2), F, {1, 1, 1}) == 0.0);

        const auto bad = pair_residual(d, f, f, {1, 1, 1});
        CHECK(std::fabs(bad[0]) + std::fabs(bad[1]) > 1.0);
    }

    TEST_CASE("the linking system is invariant under relabeling the integral")
    {
        const BacklundData d = BacklundData::from_constants({1, 2, -3}, {3, -1, -2});
        const ScalarField f = parse_field("x1+x2+x3");
        const ScalarField F = parse_field("x1/3 - 2*x2 + 3*x3/2");
        const ScalarField Fexp = exp_field(F);
        for (const Vec3& p : sample_pole_free({{-1, -1, -1}, {1, 1, 1}}, 10, 401)) {
            const auto r = pair_residual(d, f, Fexp, p);
            CHECK(std::fabs(r[0]) < 1e-12);
            CHECK(std::fabs(r[1]) < 1e-12);
        }
    }

    TEST_CASE("closed transform form integrates to the exact line integral")
    {
        const BacklundData d = BacklundData::from_constants({1, 2, -3}, {3, -1, -2});
        const ScalarField f = parse_field("x1+x2+x3");
        const double v = integrate_transform(d, f, {0, 0, 0}, {1, 1, 1}, 200);
        CHECK(v == doctest::Approx(-1.0 / 6.0).epsilon(1e-9));
        CHECK(integrate_transform(d, f, {0.4, 0.2, -0.1}, {0.4, 0.2, -0.1}, 50) == 0.0);
    }

    TEST_CASE("transform precondition: the one-form is integrable on source solutions")
    {
        const BacklundData d = BacklundData::from_constants({1, 2, -3}, {3, -1, -2});
        const OneFormField w = transform_one_form(d, source_solution());
        for (const Vec3& p : sample_pole_free({{-0.3, -0.3, -0.3}, {0.3, 0.3, 0.3}}, 10, 409))
            CHECK(std::fabs(frobenius_residual_scaled(w, p)) < 1e-9);
    }

    TEST_CASE("identity transform reproduces the input up to the base offset")
    {
        const BacklundData id = BacklundData::from_constants({1, 2, -3}, {1, 2, -3});
        const ScalarField f = source_solution();
        const Vec3 base{0, 0, 0};
        for (const Vec3& p : sample_pole_free({{-0.2, -0.2, -0.2}, {0.2, 0.2, 0.2}}, 5, 419)) {
            const double traced = integrate_transform(id, f, base, p, 200);
            CHECK(traced == doctest::Approx(f.value(p) - f.value(base)).epsilon(1e-8));
        }
    }

    TEST_CASE("traced integral has gradient along the ratio-weighted direction")
    {
        const BacklundData d = BacklundData::from_constants({1, 2, -3}, {3, -1, -2});
        const ScalarField f = source_solution();
        const Vec3 base{0, 0, 0};
        const double h = 1e-4;
        for (const Vec3& p : grid_points({{-0.2, -0.1, -0.15}, {0.25, 0.2, 0.15}}, {4, 4, 4})) {
            Vec3 gF;
            for (int a = 0; a < 3; ++a) {
                Vec3 pp = p, pm = p;
                pp[a] += h;
                pm[a] -= h;
                gF[a] = (integrate_transform(d, f, base, pp, 120) -
                         integrate_transform(d, f, base, pm, 120)) /
                        (2 * h);
            }
            const Vec3 df = f(p).grad;
            const Vec3 want{df[0] / 3.0, -2.0 * df[1], 1.5 * df[2]};
            CHECK(norm(cross(gF, want)) / (norm(gF) * norm(want)) < 1e-6);

            // undoing the ratios points back along the source gradient
            const Vec3 back{3.0 * gF[0], gF[1] / -2.0, gF[2] / 1.5};
            CHECK(norm(cross(back, df)) / (norm(back) * norm(df)) < 1e-6);
        }
    }

    TEST_CASE("a perturbed source moves both residual families off zero")
    {
        const BacklundData d = BacklundData::from_constants({1, 2, -3}, {3, -1, -2});
        const ScalarField f = parse_field("x1+x2+x3 + 0.01*x1*x2");
        const ScalarField F = parse_field("x1/3 - 2*x2 + 3*x3/2");
        const Vec3 p{1, 2, 3};
        CHECK(std::fabs(pde_residual(EquationSpec::hirota(1, 2, -3), f, p)) > 1e-4);
        const auto r = pair_residual(d, f, F, p);
        CHECK(std::fabs(r[0]) + std::fabs(r[1]) > 1e-4);
    }

    TEST_CASE("step counts are validated and degenerate directions rejected")
    {
        const BacklundData d = BacklundData::from_constants({1, 2, -3}, {3, -1, -2});
        const ScalarField f = parse_field("x1+x2+x3");
        CHECK_THROWS_AS(integrate_transform(d, f, {0, 0, 0}, {1, 1, 1}, 0), domain_error);
        // a candidate whose gradient annihilates the transversal direction:
        // omega . dir = f1/9 + 4 f2 + 2.25 f3 = 1 + 4 - 5 = 0
        const ScalarField flat = parse_field("9*x1 + x2 - 20*x3/9");
        const OneFormField w = transform_one_form(d, flat);
        const Vec3 dir{1.0 / 3.0, -2.0, 1.5};
        CHECK(std::fabs(dot(w({0, 0, 0}), dir)) < 1e-12);
        CHECK_THROWS_AS(integrate_transform(d, flat, {0, 0, 0}, {1, 0, 0}, 10), evaluation_error);
    }
}
