#include <doctest.h>

#include <random>

#include "narrowgap/expression.hpp"
#include "narrowgap/geometry.hpp"

using namespace narrowgap;

TEST_CASE("profile evaluation at the origin and off axis")
{
    const GapProfile g = quadratic_gap(1);
    const ProfileEval at0 = eval_profile(g, {0, 0, 0}, 2);
    CHECK(at0.h1.value == 0.0);
    CHECK(at0.h2.value == 0.0);
    CHECK(at0.h1.grad[0] == 0.0);
    CHECK(at0.h1.hess[0][0] - at0.h2.hess[0][0] == 2.0);

    const ProfileEval at3 = eval_profile(g, {0.3, 0, 0}, 1);
    CHECK(at3.h1.value == doctest::Approx(0.045).epsilon(1e-15));
    CHECK(at3.h1.grad[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK_THROWS_AS(eval_profile(g, {1.1, 0, 0}, 0), DomainError);
}

TEST_CASE("profile gradients match central differences")
{
    GapProfile g;
    g.h1 = parse_expression("0.5*x1^2 + 0.3*x1*x2 + x2^2 + 0.1*x1^3", 2);
    g.h2 = parse_expression("-0.4*x1^2 - 0.5*x2^2 + 0.2*x2^3", 2);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-0.6, 0.6);
    const double h = 1e-5;
    for (int trial = 0; trial < 100; ++trial) {
        const Vec x{U(rng), U(rng), 0.0};
        const ProfileEval e = eval_profile(g, x, 1);
        for (int a = 0; a < 2; ++a) {
            Vec xp = x, xm = x;
            xp[a] += h;
            xm[a] -= h;
            const double fd1 = (g.h1.value(xp) - g.h1.value(xm)) / (2 * h);
            const double fd2 = (g.h2.value(xp) - g.h2.value(xm)) / (2 * h);
            CHECK(std::abs(fd1 - e.h1.grad[a]) <= 1e-8 * std::max(1.0, std::abs(e.h1.grad[a])));
            CHECK(std::abs(fd2 - e.h2.grad[a]) <= 1e-8 * std::max(1.0, std::abs(e.h2.grad[a])));
        }
    }
}

TEST_CASE("quadratic gap passes validation with eigenvalue 2")
{
    GapProfile g = quadratic_gap(1);
    g.kappa0 = 1.0;
    const NarrowRegion region(2, 0.1, g);
    const ValidationReport rep = validate_profile(region, 33, 1e-9);
    CHECK(rep.passed());
    CHECK(rep.min_eigenvalue == doctest::Approx(2.0).epsilon(1e-14));
    // delta = eps + |x'|^2 exactly, so both comparability constants are 1.
    CHECK(rep.gap_ratio_min == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rep.gap_ratio_max == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("flat gap fails the convexity check unless overridden")
{
    GapProfile g = flat_gap(1);
    g.kappa0 = 1.0;
    const NarrowRegion region(2, 0.1, g);
    const ValidationReport rep = validate_profile(region, 33, 1e-9);
    CHECK_FALSE(rep.passed());
    const HypothesisCheck* k0 = rep.find("kappa0_convexity");
    REQUIRE(k0 != nullptr);
    CHECK_FALSE(k0->passed);
    CHECK(k0->measured == 0.0);

    const ValidationReport over = validate_profile(region, 33, 1e-9, true);
    CHECK(over.passed());
    CHECK(over.find("kappa0_convexity")->overridden);
}

TEST_CASE("cubic perturbation: convexity at the origin and sampled C2 norm")
{
    GapProfile g;
    g.h1 = parse_expression("0.5*x1^2 + x1^3", 1);
    g.h2 = parse_expression("0", 1);
    g.kappa0 = 1.0;
    // The gap eps + x^2/2 + x^3 stays positive on [-1, 1] only for eps > 1/2.
    const NarrowRegion region(2, 1.0, g);
    const ValidationReport rep = validate_profile(region, 129, 1e-9);
    CHECK(rep.find("kappa0_convexity")->passed);
    CHECK(rep.min_eigenvalue == doctest::Approx(1.0).epsilon(1e-14));
    // On [-1, 1]: sup|h| = 1.5, sup|h'| = 4, sup|h''| = 7, all at x = 1.
    CHECK(rep.c2_norm == doctest::Approx(12.5).epsilon(0.01));

    CHECK_THROWS_AS(validate_profile(NarrowRegion(2, 0.1, g), 33, 1e-9), ValidationError);
}

TEST_CASE("gap width")
{
    const NarrowRegion region(2, 0.1, quadratic_gap(1));
    CHECK(region.gap_width({0, 0, 0}) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(region.gap_width({0.3, 0, 0}) == doctest::Approx(0.19).epsilon(1e-15));
    CHECK(region.top({0, 0, 0}) == doctest::Approx(0.05));
    CHECK(region.bottom({0, 0, 0}) == doctest::Approx(-0.05));

    const NarrowRegion r3(3, 0.05, quadratic_gap(2));
    CHECK(r3.gap_width({0.3, 0.4, 0}) == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("analysis windows")
{
    const NarrowRegion region(2, 0.1, quadratic_gap(1));
    const LocalWindow w0 = window(region, {0, 0, 0});
    CHECK(w0.radius == doctest::Approx(0.1));
    const LocalWindow w4 = window(region, {0.4, 0, 0});
    CHECK(w4.radius == doctest::Approx(0.1 + 0.16));
    CHECK(w4.center[0] == 0.4);

    const NarrowRegion small(2, 0.1, quadratic_gap(1), 0.5, 0.25);
    CHECK_THROWS_AS(window(small, {0.45, 0, 0}, 0.2), DomainError);
    CHECK_THROWS_AS(NarrowRegion(2, 0.0, quadratic_gap(1)), DomainError);
    CHECK_THROWS_AS(NarrowRegion(2, 0.1, quadratic_gap(1), 0.5, 0.6), DomainError);
}
