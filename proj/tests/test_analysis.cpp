#include "doctest.h"

#include <cmath>
#include <memory>

#include "narrowgap/analysis.hpp"
#include "narrowgap/expression.hpp"

using namespace narrowgap;

namespace {

std::shared_ptr<const MappedGrid> make_grid(double eps, GapProfile prof, int nx, int nt)
{
    return std::make_shared<const MappedGrid>(NarrowRegion(2, eps, std::move(prof)), nx, nt);
}

Polynomial P(const char* s)
{
    return parse_expression(s, 1);
}

GradientField correction_gradient(const SolutionField& u, const BoundaryData& data)
{
    std::vector<double> w = u.values;
    const std::vector<double> ut = nodal_utilde(*u.grid, data);
    for (std::size_t q = 0; q < w.size(); ++q) w[q] -= ut[q];
    return gradient(u.grid, u.components, w);
}

} // namespace

TEST_CASE("flat gap: normal derivative 1/eps everywhere, c_low exactly 1, no correction")
{
    const double eps = 0.05;
    const auto grid = make_grid(eps, flat_gap(1), 65, 17);
    const BoundaryData data = BoundaryData::constant(1, {1.0}, {0.0});
    const SolutionField u = solve(make_laplace(2), grid, data);
    const GradientField g = gradient(u);
    double worst = 0.0;
    for (int node = 0; node < grid->nodes(); ++node) {
        worst = std::max(worst, std::abs(g.at(0, node, 1) - 1.0 / eps));
        worst = std::max(worst, std::abs(g.at(0, node, 0)));
    }
    CHECK(worst < 1e-8);

    const auto c = centerline_lower_constant(g, data);
    REQUIRE(c);
    CHECK(*c == doctest::Approx(1.0).epsilon(1e-9));

    const GradientField gw = correction_gradient(u, data);
    CHECK(energy_half(gw) < 1e-20);
    const PointwiseFactors pf = pointwise_w_check(gw, data, 0.0, 0.25);
    CHECK(pf.m_inner.value_or(0.0) < 1e-8);
    CHECK(pf.m_outer.value_or(0.0) < 1e-8);

    const BoundReport rep = analyze(u, data, {});
    CHECK(rep.sup_grad == doctest::Approx(1.0 / eps).epsilon(1e-6));
}

TEST_CASE("matched and zero data")
{
    const auto grid = make_grid(0.05, quadratic_gap(1), 33, 17);
    const BoundaryData c = BoundaryData::constant(1, {0.7}, {0.7});
    const SolutionField u = solve(make_laplace(2), grid, c);
    const GradientField g = gradient(u);
    for (int node = 0; node < grid->nodes(); ++node) CHECK(g.norm(node) < 1e-9);
    CHECK_FALSE(centerline_lower_constant(g, c).has_value());

    const BoundaryData zero = BoundaryData::constant(1, {0.0}, {0.0});
    const BoundReport rep = analyze(solve(make_laplace(2), grid, zero), zero, {});
    CHECK(rep.sup_grad == 0.0);
    CHECK(rep.C_emp == 0.0);
    CHECK_FALSE(rep.c_low.has_value());

    // Matched polynomial data: the correction gradient obeys the matched bound.
    const BoundaryData m({P("x1")}, {P("x1")});
    const SolutionField um = solve(make_laplace(2), grid, m);
    const GradientField gw = correction_gradient(um, m);
    const double w_l2 = l2_norm(*grid, 1, [&] {
        std::vector<double> w = um.values;
        const auto ut = nodal_utilde(*grid, m);
        for (std::size_t q = 0; q < w.size(); ++q) w[q] -= ut[q];
        return w;
    }());
    const PointwiseFactors pf = pointwise_w_check(gw, m, w_l2, 0.25);
    REQUIRE(pf.m_inner);
    const double budget = m.c2_norm_plus() + m.c2_norm_minus() + w_l2;
    for (int node = 0; node < grid->nodes(); ++node) {
        const int col = grid->column_of(node);
        if (std::abs(grid->column_point(col)[0]) <= std::sqrt(0.05)) CHECK(gw.norm(node) <= *pf.m_inner * budget * (1 + 1e-12));
    }
}

TEST_CASE("recovered gradient of the interpolant converges at order 2")
{
    // Quartic data so that the mapped interpolant is not reproduced exactly.
    const BoundaryData data({P("1 + x1^4")}, {P("x1^3 - x1")});
    double err[3] = {0, 0, 0};
    const int nx[3] = {33, 65, 129};
    for (int level = 0; level < 3; ++level) {
        const auto grid = make_grid(0.1, quadratic_gap(1), nx[level], (nx[level] + 1) / 2);
        const GradientField g = gradient(grid, 1, nodal_utilde(*grid, data));
        for (int node = 0; node < grid->nodes(); ++node) {
            const Vec x = grid->physical_node(node);
            const Jet exact = utilde(grid->region(), data, 0, x, 1)[0];
            for (int a = 0; a < 2; ++a) err[level] = std::max(err[level], std::abs(g.at(0, node, a) - exact.grad[a]));
        }
    }
    INFO(err[0], " ", err[1], " ", err[2]);
    CHECK(std::log2(err[0] / err[1]) == doctest::Approx(2.0).epsilon(0.1));
    CHECK(std::log2(err[1] / err[2]) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("energies are monotone in the window size")
{
    const BoundaryData data = BoundaryData::constant(1, {1.0}, {0.0});
    const auto grid = make_grid(0.05, quadratic_gap(1), 65, 33);
    const GradientField gw = correction_gradient(solve(make_laplace(2), grid, data), data);
    const auto F = local_energy_profile(gw, {0, 0, 0}, {0.02, 0.05, 0.1, 0.2, 0.4});
    for (std::size_t q = 1; q < F.size(); ++q) CHECK(F[q].second >= F[q - 1].second);
    CHECK(energy(gw, {0, 0, 0}, 0.05) <= energy_half(gw));
    CHECK(energy_half(gw) > 0.0);
}

TEST_CASE("scaling the data scales the gradient exactly")
{
    const BoundaryData data({P("1 + 0.3*x1")}, {P("x1^2")});
    const auto grid = make_grid(0.05, quadratic_gap(1), 33, 17);
    const BoundReport a = analyze(solve(make_laplace(2), grid, data), data, {});
    const BoundaryData scaled = data.scaled(-3.0);
    const BoundReport b = analyze(solve(make_laplace(2), grid, scaled), scaled, {});
    CHECK(b.sup_grad == doctest::Approx(3.0 * a.sup_grad).epsilon(1e-9));
}

TEST_CASE("rate fit")
{
    const RateFit f = fit_rate({{0.1, 10.0}, {0.05, 20.0}, {0.025, 40.0}});
    CHECK(f.slope == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.conclusive);
    CHECK(std::exp(f.intercept) == doctest::Approx(1.0).epsilon(1e-12));

    const RateFit flat = fit_rate({{0.1, 2.0}, {0.05, 2.0}, {0.025, 2.0}});
    CHECK(flat.slope == 0.0);
    CHECK(flat.r2 == 1.0);

    CHECK_THROWS_AS(fit_rate({{0.1, 1.0}, {0.05, 2.0}}), DomainError);
    CHECK_THROWS_AS(fit_rate({{0.1, 1.0}, {0.05, 0.0}, {0.025, 1.0}}), DomainError);
    CHECK_THROWS_AS(fit_rate({{0.05, 1.0}, {0.1, 2.0}, {0.025, 1.0}}), DomainError);
}

TEST_CASE("spread")
{
    CHECK(spread({1.0, 2.0, std::nullopt, 1.5}).value() == 2.0);
    CHECK_FALSE(spread({1.0, std::nullopt}).has_value());
}
