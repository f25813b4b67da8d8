#include <doctest.h>

#include <random>

#include "narrowgap/expression.hpp"

using namespace narrowgap;

TEST_CASE("half square is a single quadratic term")
{
    const Polynomial p = parse_expression("0.5*x1^2", 1);
    REQUIRE(p.terms().size() == 1);
    CHECK(p.coefficient({2, 0, 0}) == 0.5);
    CHECK(p.degree() == 2);
}

TEST_CASE("two-variable expression keeps both monomials")
{
    const Polynomial p = parse_expression("x1^2 - x1*x2", 2);
    REQUIRE(p.terms().size() == 2);
    CHECK(p.coefficient({2, 0, 0}) == 1.0);
    CHECK(p.coefficient({1, 1, 0}) == -1.0);
}

TEST_CASE("parser rejects malformed input with a position")
{
    auto position_of = [](std::string_view text, int n) -> std::size_t {
        try {
            (void)parse_expression(text, n);
        } catch (const ParseError& e) {
            return e.position();
        }
        FAIL("no ParseError for '" << text << "'");
        return 0;
    };
    // The fractional exponent is rejected at the exponent.
    CHECK(position_of("x1^2.5", 1) >= 3);
    CHECK_THROWS_AS(parse_expression("x2", 1), ParseError);
    CHECK_THROWS_AS(parse_expression("x1 +", 1), ParseError);
    CHECK_THROWS_AS(parse_expression("(x1", 1), ParseError);
    CHECK_THROWS_AS(parse_expression("x1^-1", 1), ParseError);
    CHECK_THROWS_AS(parse_expression("", 1), ParseError);
    CHECK_THROWS_AS(parse_expression("2 x1", 1), ParseError);
}

TEST_CASE("whitespace, parentheses and signs")
{
    const Polynomial a = parse_expression(" ( x1 + 1 ) ^ 2 ", 1);
    const Polynomial b = parse_expression("x1^2+2*x1+1", 1);
    CHECK((a - b).is_zero());
    CHECK(parse_expression("-x1 + -2", 1).coefficient({0, 0, 0}) == -2.0);
    CHECK(parse_expression("1.5e-1*x1", 1).coefficient({1, 0, 0}) == doctest::Approx(0.15));
}

TEST_CASE("polynomial jets agree with central differences")
{
    const Polynomial p = parse_expression("0.5*x1^2 + x1^3 - 2*x1*x2 + 0.25*x2^4", 2);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-0.7, 0.7);
    const double h = 1e-5;
    for (int trial = 0; trial < 100; ++trial) {
        const Vec x{U(rng), U(rng), 0.0};
        const Jet j = p.jet(x, 2);
        CHECK(j.value == doctest::Approx(p.value(x)).epsilon(1e-14));
        for (int a = 0; a < 2; ++a) {
            Vec xp = x, xm = x;
            xp[a] += h;
            xm[a] -= h;
            const double fd = (p.value(xp) - p.value(xm)) / (2 * h);
            CHECK(std::abs(fd - j.grad[a]) <= 1e-8 * std::max(1.0, std::abs(j.grad[a])));
            const Jet jp = p.jet(xp, 1), jm = p.jet(xm, 1);
            for (int b = 0; b < 2; ++b)
                CHECK(std::abs((jp.grad[b] - jm.grad[b]) / (2 * h) - j.hess[a][b]) <= 1e-7);
        }
    }
}

TEST_CASE("affine composition and products")
{
    const Polynomial p = parse_expression("x1^2 + x1", 1);
    const Polynomial q = p.compose_affine({2.0, 1.0, 1.0}, {1.0, 0.0, 0.0});
    // (2y + 1)^2 + 2y + 1 = 4y^2 + 6y + 2
    CHECK((q - parse_expression("4*x1^2 + 6*x1 + 2", 1)).is_zero());
    CHECK((p * p - p.pow(2)).is_zero());
    CHECK(p.derivative(0).value({3.0, 0, 0}) == 7.0);
    CHECK_THROWS_AS(parse_expression("x1^9", 1), ParseError);
}
