#include <veronese/einstein_weyl.hpp>
#include <veronese/expr.hpp>
#include <veronese/probe.hpp>
#include <veronese/webs.hpp>

#include <doctest.h>

using namespace veronese;

namespace {

// grid on the ordered domain, away from coordinate coincidences
std::vector<Vec3> ordered_grid(int n)
{
    std::vector<Vec3> pts;
    for (const Vec3& p : grid_points({{2.5, 1.5, 0.5}, {3.5, 2.5, 1.5}}, {n, n, n}))
        if (p[0] - p[1] > 1e-3 && p[1] - p[2] > 1e-3) pts.push_back(p);
    return pts;
}

WeylStructure cross_ratio_structure()
{
    return assemble_weyl_A(coordinate_field(1), coordinate_field(2), coordinate_field(3),
                           parse_field("(x3-x2)/(x1-x2)"));
}

} // namespace

TEST_SUITE("einstein_weyl")
{
    TEST_CASE("constant data flattens the structure")
    {
        const WeylStructure W = assemble_weyl_A(constant_field(1.0), constant_field(2.0),
                                                constant_field(-3.0), parse_field("x1+x2+x3"));
        const Vec3 p{0.3, -1.0, 2.0};
        // displayed cross coefficient 2 (l1-l3)(l2-l3)/f3 = 2*4*5 = 40
        CHECK(2.0 * W.g[0][1].value(p) == doctest::Approx(40.0).epsilon(1e-14));
        CHECK(W.g[0][1].value(p) == W.g[1][0].value(p));
        CHECK(max_abs(W.omega(p)) == 0.0);
        CHECK(einstein_weyl_residual(W, p) == doctest::Approx(0.0));
        CHECK(weyl_compatibility_residual(W, p) == doctest::Approx(0.0));
    }

    TEST_CASE("vanishing gradient components are rejected at evaluation")
    {
        const WeylStructure W = assemble_weyl_A(coordinate_field(1), coordinate_field(2),
                                                coordinate_field(3), parse_field("x1 + x3"));
        CHECK_THROWS_AS((void)W.g[0][0].value({3, 2, 1}), domain_error); // f2 = 0
    }

    TEST_CASE("the compatibility identity pins the connection convention")
    {
        const WeylStructure W = cross_ratio_structure();
        for (const Vec3& p : ordered_grid(3)) CHECK(weyl_compatibility_residual(W, p) < 1e-9);
    }

    TEST_CASE("solutions carry an Einstein-Weyl structure")
    {
        const WeylStructure W = cross_ratio_structure();
        CHECK(einstein_weyl_residual(W, {3, 2, 1}) < 1e-7);
        for (const Vec3& p : ordered_grid(3)) CHECK(einstein_weyl_residual(W, p) < 1e-7);
    }

    TEST_CASE("non-solutions break the curvature condition")
    {
        const WeylStructure W = assemble_weyl_A(coordinate_field(1), coordinate_field(2),
                                                coordinate_field(3), parse_field("x1*x2 + x3"));
        CHECK(einstein_weyl_residual(W, {1, 2, 3}) > 1e-3);
    }

    TEST_CASE("the metric-only recovery reproduces the displayed one-form")
    {
        const WeylStructure W = cross_ratio_structure();
        const Vec3 p{3, 2, 1};
        const Vec3 uo = universal_omega(W.g, p);
        const Vec3 eo = W.omega(p);
        CHECK(max_abs(uo - eo) < 1e-8);
        for (const Vec3& q : ordered_grid(2)) CHECK(max_abs(universal_omega(W.g, q) - W.omega(q)) < 1e-8);
    }

    TEST_CASE("constant metrics have vanishing recovered one-form")
    {
        MetricField g;
        const Mat3 m{{{2, 0.5, 0}, {0.5, -1, 0.3}, {0, 0.3, 1}}};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) g[i][j] = constant_field(m[i][j]);
        CHECK(max_abs(universal_omega(g, {1, 2, 3})) == 0.0);
    }

    TEST_CASE("conformal rescaling with the matching gauge shift preserves the residual")
    {
        const WeylStructure W = cross_ratio_structure();
        const ScalarField s = 1.0 + 0.1 * coordinate_field(1);
        WeylStructure Wg;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) Wg.g[i][j] = s * s * W.g[i][j];
        const ScalarField lns = ln_field(s);
        for (int i = 0; i < 3; ++i)
            Wg.omega.coeff[i] = W.omega.coeff[i] + 2.0 * derivative_field(lns, i + 1);
        for (const Vec3& p : ordered_grid(2)) {
            CHECK(einstein_weyl_residual(Wg, p) < 1e-7);
            CHECK(weyl_compatibility_residual(Wg, p) < 1e-9);
        }
    }

    TEST_CASE("curvature and equation residuals vanish together at desk scale")
    {
        const EquationSpec a0 = equation_from_tag(NormalFormTag::A0);
        const std::array<ScalarField, 3> corpus{parse_field("(x3-x2)/(x1-x2)"),
                                                parse_field("x1+x2+x3"),
                                                parse_field("x1*x2 + x3")};
        for (const ScalarField& f : corpus) {
            const WeylStructure W = assemble_weyl_A(coordinate_field(1), coordinate_field(2),
                                                    coordinate_field(3), f);
            for (const Vec3& p : ordered_grid(5)) {
                const bool ew_flat = einstein_weyl_residual(W, p) < 1e-7;
                const bool solves = std::fabs(pde_residual(a0, f, p)) < 1e-9;
                CHECK(ew_flat == solves);
            }
        }
    }
}
