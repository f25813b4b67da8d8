#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <memory>

#include "narrowgap/assembly.hpp"
#include "narrowgap/expression.hpp"
#include "narrowgap/linear_solver.hpp"

using namespace narrowgap;

namespace {

std::shared_ptr<const MappedGrid> make_grid(int n, double eps, GapProfile prof, int nx, int nt)
{
    return std::make_shared<const MappedGrid>(NarrowRegion(n, eps, std::move(prof)), nx, nt);
}

double flat_value(double a, double b, double eps, double xn) { return b + (a - b) * (xn + 0.5 * eps) / eps; }

} // namespace

TEST_CASE("grid layout on the quadratic gap")
{
    const auto g = make_grid(2, 0.1, quadratic_gap(1), 33, 17);
    CHECK(g->nodes() == 561);
    const int c0 = g->center_column();
    CHECK(g->column_point(c0)[0] == doctest::Approx(0.0));
    CHECK(g->physical(c0, 0)[1] == doctest::Approx(-0.05));
    CHECK(g->physical(c0, 16)[1] == doctest::Approx(0.05));
    CHECK(g->physical(c0, 8)[1] == doctest::Approx(0.0));
    for (int c = 0; c < g->columns(); ++c) CHECK(g->delta(c) == g->region().gap_width(g->column_point(c)));
    CHECK_THROWS_AS(MappedGrid(NarrowRegion(2, 0.1, quadratic_gap(1)), 32, 17), DomainError);
    CHECK_THROWS_AS(MappedGrid(NarrowRegion(2, 0.1, quadratic_gap(1)), 7, 17), DomainError);
}

TEST_CASE("flat gap metric terms vanish")
{
    const auto g = make_grid(3, 0.05, flat_gap(2), 9, 9);
    for (int c = 0; c < g->columns(); ++c) {
        const Vec m = g->metric(c, 3);
        CHECK(m[0] == 0.0);
        CHECK(m[1] == 0.0);
        CHECK(g->delta(c) == 0.05);
    }
}

TEST_CASE("interior row sums vanish for pure second-order operators")
{
    // Constants lie in the kernel: every interior row of the unreduced
    // operator sums to zero. Reassembling with all-ones boundary data and
    // checking that the interior right-hand side balances the row gives the
    // same statement after Dirichlet elimination.
    const auto g = make_grid(2, 0.05, quadratic_gap(1), 17, 9);
    const EllipticOperator op = make_laplace(2);
    const LinearSystem sys = assemble(op, *g, BoundaryData::constant(1, {1.0}, {1.0}));
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(sys.size());
    const Eigen::VectorXd r = sys.matrix * ones - sys.rhs;
    CHECK(r.cwiseAbs().maxCoeff() < 1e-9 * sys.matrix.coeffs().cwiseAbs().maxCoeff());
}

TEST_CASE("flat gap reproduces the linear profile")
{
    for (double eps : {0.1, 0.025}) {
        const auto g = make_grid(2, eps, flat_gap(1), 17, 17);
        const SolutionField s = solve(make_laplace(2), g, BoundaryData::constant(1, {1.0}, {0.0}));
        double err = 0.0;
        for (int nd = 0; nd < g->nodes(); ++nd)
            err = std::max(err, std::abs(s.at(0, nd) - flat_value(1.0, 0.0, eps, g->physical_node(nd)[1])));
        CHECK(err < 1e-10);

        const SolutionField v = solve(make_lame(2, 1.0, 1.0), g, BoundaryData::constant(1, {1.0, -2.0}, {0.0, 3.0}));
        double err2 = 0.0;
        for (int nd = 0; nd < g->nodes(); ++nd) {
            const double xn = g->physical_node(nd)[1];
            err2 = std::max(err2, std::abs(v.at(0, nd) - flat_value(1.0, 0.0, eps, xn)));
            err2 = std::max(err2, std::abs(v.at(1, nd) - flat_value(-2.0, 3.0, eps, xn)));
        }
        CHECK(err2 < 1e-10);
    }
}

TEST_CASE("identity-only system returns the boundary data")
{
    LinearSystem sys;
    sys.components = 1;
    sys.nodes = 4;
    sys.dirichlet.assign(4, 1);
    sys.matrix.resize(4, 4);
    sys.matrix.setIdentity();
    sys.rhs = Eigen::Vector4d(1.0, -2.0, 3.5, 0.0);
    const auto g = make_grid(2, 0.1, quadratic_gap(1), 9, 9);
    const SolutionField s = solve_system(sys, g);
    CHECK(s.values == std::vector<double>{1.0, -2.0, 3.5, 0.0});
    CHECK(s.residual == 0.0);
}

TEST_CASE("discrete maximum principle for the scalar problem")
{
    const auto g = make_grid(2, 0.05, quadratic_gap(1), 33, 17);
    const BoundaryData data({parse_expression("1 + x1 - x1^2", 1)}, {parse_expression("0.5*x1^3 - 1", 1)});
    const SolutionField s = solve(make_laplace(2), g, data);
    double gmin = 1e300, gmax = -1e300;
    for (int c = 0; c < g->columns(); ++c) {
        for (int k = 0; k < g->nt(); ++k) {
            if (!g->lateral(c) && k != 0 && k != g->nt() - 1) continue;
            gmin = std::min(gmin, s.at(0, g->node(c, k)));
            gmax = std::max(gmax, s.at(0, g->node(c, k)));
        }
    }
    for (double v : s.values) {
        CHECK(v >= gmin - 1e-8);
        CHECK(v <= gmax + 1e-8);
    }
}

TEST_CASE("direct and Krylov solves agree for the Lame system")
{
    const auto g = make_grid(2, 0.05, quadratic_gap(1), 65, 65);
    const BoundaryData data({parse_expression("1 + x1", 1), parse_expression("x1^2", 1)},
                            {parse_expression("0", 1), parse_expression("-1 + 0.5*x1", 1)});
    const EllipticOperator op = make_lame(2, 1.0, 1.0);
    SolveOptions direct;
    direct.method = SolveMethod::direct;
    SolveOptions krylov;
    krylov.method = SolveMethod::krylov;
    const SolutionField a = solve(op, g, data, direct);
    const SolutionField b = solve(op, g, data, krylov);
    CHECK(a.method == "direct");
    CHECK(b.method == "krylov");
    CHECK(b.residual <= 1e-10);
    CHECK_FALSE(b.residual_history.empty());
    double diff = 0.0;
    for (std::size_t q = 0; q < a.values.size(); ++q) diff = std::max(diff, std::abs(a.values[q] - b.values[q]));
    CHECK(diff < 1e-8);
}

TEST_CASE("superposition of component solves")
{
    const auto g = make_grid(2, 0.05, quadratic_gap(1), 33, 17);
    const BoundaryData data({parse_expression("1 + x1", 1), parse_expression("x1^2 - 2", 1)},
                            {parse_expression("0.3", 1), parse_expression("x1", 1)});
    const EllipticOperator op = make_lame(2, 1.0, 1.0);
    const SolutionField full = solve(op, g, data);
    const SolutionField v0 = solve_component(op, g, data, 0);
    const SolutionField v1 = solve_component(op, g, data, 1);
    double diff = 0.0;
    for (std::size_t q = 0; q < full.values.size(); ++q)
        diff = std::max(diff, std::abs(full.values[q] - v0.values[q] - v1.values[q]));
    CHECK(diff <= 10 * 1e-10);
    CHECK_THROWS_AS(solve_component(op, g, data, 2), DomainError);

    const BoundaryData only({parse_expression("1 + x1", 1), parse_expression("0", 1)},
                            {parse_expression("0.3", 1), parse_expression("0", 1)});
    const SolutionField u = solve(op, g, only);
    const SolutionField w = solve_component(op, g, only, 0);
    CHECK(u.values == w.values);
}

TEST_CASE("boundary rows reproduce data and the constant closure")
{
    const auto g = make_grid(2, 0.1, quadratic_gap(1), 17, 9);
    const BoundaryData data({parse_expression("2 + x1", 1)}, {parse_expression("x1", 1)});
    SolveOptions opts;
    opts.closure = LateralClosure::constant;
    const SolutionField s = solve(make_laplace(2), g, data, opts);
    const int c = 0; // lateral column at x1 = -1
    CHECK(s.at(0, g->node(c, 0)) == -1.0);
    CHECK(s.at(0, g->node(c, g->nt() - 1)) == 1.0);
    for (int k = 1; k < g->nt() - 1; ++k) CHECK(s.at(0, g->node(c, k)) == 0.0);
}
