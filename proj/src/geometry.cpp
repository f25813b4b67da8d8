#include "narrowgap/geometry.hpp"

#include <algorithm>
#include <limits>

#include <Eigen/Dense>

namespace narrowgap {

Polynomial half_square_norm(int tangential_dim, double a)
{
    Polynomial p(tangential_dim);
    for (int k = 0; k < tangential_dim; ++k) {
        Exponent e{};
        e[k] = 2;
        p += Polynomial::monomial(tangential_dim, e, 0.5 * a);
    }
    return p;
}

GapProfile quadratic_gap(int tangential_dim)
{
    GapProfile g;
    g.h1 = half_square_norm(tangential_dim);
    g.h2 = half_square_norm(tangential_dim, -1.0);
    g.kappa0 = 1.0;
    g.kappa1 = 100.0;
    return g;
}

GapProfile flat_gap(int tangential_dim)
{
    GapProfile g;
    g.h1 = Polynomial(tangential_dim);
    g.h2 = Polynomial(tangential_dim);
    return g;
}

ProfileEval eval_profile(const GapProfile& profile, const Vec& x_prime, int order)
{
    const int d = profile.tangential_dim();
    if (norm(x_prime, d) > 1.0 + 1e-12) throw DomainError("eval_profile: point outside B_1(0')");
    if (order < 0 || order > 2) throw std::invalid_argument("eval_profile: order must be 0, 1 or 2");
    return ProfileEval{profile.h1.jet(x_prime, order), profile.h2.jet(x_prime, order)};
}

NarrowRegion::NarrowRegion(int n, double epsilon, GapProfile profile, double r_solve, double r_analyze)
    : n_(n), epsilon_(epsilon), profile_(std::move(profile)), r_solve_(r_solve), r_analyze_(r_analyze)
{
    if (n < 2 || n > 3) throw DomainError("narrow region: dimension must be 2 or 3");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw DomainError("narrow region: epsilon must be positive");
    if (!(0.0 < r_analyze && r_analyze < r_solve && r_solve <= 1.0))
        throw DomainError("narrow region: need 0 < r_analyze < r_solve <= 1");
    if (profile_.h1.n_vars() != n - 1 || profile_.h2.n_vars() != n - 1)
        throw DomainError("narrow region: profile polynomials must be in n-1 variables");
}

NarrowRegion NarrowRegion::with_epsilon(double epsilon) const
{
    return NarrowRegion(n_, epsilon, profile_, r_solve_, r_analyze_);
}

double NarrowRegion::gap_width(const Vec& x_prime) const
{
    return epsilon_ + profile_.h1.value(x_prime) - profile_.h2.value(x_prime);
}

double NarrowRegion::top(const Vec& x_prime) const
{
    return 0.5 * epsilon_ + profile_.h1.value(x_prime);
}

double NarrowRegion::bottom(const Vec& x_prime) const
{
    return -0.5 * epsilon_ + profile_.h2.value(x_prime);
}

bool ValidationReport::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const HypothesisCheck& c) { return c.passed || c.overridden; });
}

const HypothesisCheck* ValidationReport::find(const std::string& name) const
{
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

std::vector<Vec> sample_ball(int dim, double r, int samples_per_dim)
{
    std::vector<Vec> pts;
    const int m = std::max(samples_per_dim, 2);
    const double step = 2.0 * r / (m - 1);
    if (dim == 1) {
        for (int i = 0; i < m; ++i) pts.push_back(Vec{-r + i * step, 0.0, 0.0});
    } else if (dim == 2) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                Vec p{-r + i * step, -r + j * step, 0.0};
                if (norm(p, 2) <= r * (1.0 + 1e-12)) pts.push_back(p);
            }
    } else {
        throw DomainError("sample_ball: tangential dimension must be 1 or 2");
    }
    return pts;
}

double sampled_c2_norm(const Polynomial& p, int dim, double r, int samples_per_dim)
{
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (const Vec& x : sample_ball(dim, r, samples_per_dim)) {
        const Jet j = p.jet(x, 2);
        s0 = std::max(s0, std::abs(j.value));
        s1 = std::max(s1, norm(j.grad, dim));
        s2 = std::max(s2, frobenius(j.hess, dim));
    }
    return s0 + s1 + s2;
}

ValidationReport validate_profile(const NarrowRegion& region, int samples_per_dim, double tol, bool allow_degenerate)
{
    if (samples_per_dim < 16) throw std::invalid_argument("validate_profile: samples_per_dim must be >= 16");
    const GapProfile& prof = region.profile();
    const int d = region.tangential_dim();
    ValidationReport rep;

    // Vanishing value and gradient at 0', read off the coefficients.
    double origin_defect = 0.0;
    for (const Polynomial* h : {&prof.h1, &prof.h2}) {
        origin_defect = std::max(origin_defect, std::abs(h->coefficient(Exponent{})));
        for (int k = 0; k < d; ++k) {
            Exponent e{};
            e[k] = 1;
            origin_defect = std::max(origin_defect, std::abs(h->coefficient(e)));
        }
    }
    rep.checks.push_back({"origin_tangency", origin_defect <= tol, origin_defect, tol, false});

    // Strict convexity of h1 - h2 at the origin.
    const Polynomial diff = prof.h1 - prof.h2;
    const Jet dj = diff.jet(Vec{}, 2);
    Eigen::MatrixXd hess(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) hess(a, b) = dj.hess[a][b];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess, Eigen::EigenvaluesOnly);
    rep.min_eigenvalue = eig.eigenvalues().minCoeff();
    const bool convex = rep.min_eigenvalue >= prof.kappa0 && rep.min_eigenvalue > tol;
    rep.checks.push_back({"kappa0_convexity", convex, rep.min_eigenvalue, prof.kappa0, !convex && allow_degenerate});

    // C^2 bound on B_1.
    rep.c2_norm = sampled_c2_norm(prof.h1, d, 1.0, samples_per_dim) + sampled_c2_norm(prof.h2, d, 1.0, samples_per_dim);
    rep.checks.push_back({"kappa1_c2_bound", rep.c2_norm <= prof.kappa1, rep.c2_norm, prof.kappa1, false});

    // Positive gap on B_1, and the two-sided comparison with eps + |x'|^2 on B_{r_solve}.
    double min_gap = std::numeric_limits<double>::infinity();
    for (const Vec& x : sample_ball(d, 1.0, samples_per_dim)) min_gap = std::min(min_gap, region.gap_width(x));
    if (!(min_gap > 0.0))
        throw ValidationError("validate_profile: gap width " + std::to_string(min_gap) + " is not positive on B_1");
    rep.checks.push_back({"positive_gap", true, min_gap, 0.0, false});

    rep.gap_ratio_min = std::numeric_limits<double>::infinity();
    rep.gap_ratio_max = 0.0;
    for (const Vec& x : sample_ball(d, region.r_solve(), samples_per_dim)) {
        const double r = norm(x, d);
        const double ratio = region.gap_width(x) / (region.epsilon() + r * r);
        rep.gap_ratio_min = std::min(rep.gap_ratio_min, ratio);
        rep.gap_ratio_max = std::max(rep.gap_ratio_max, ratio);
    }
    rep.gap_constant = std::max(rep.gap_ratio_max, 1.0 / rep.gap_ratio_min);
    return rep;
}

LocalWindow window(const NarrowRegion& region, const Vec& x0_prime, std::optional<double> s)
{
    const int d = region.tangential_dim();
    const double radius = s.value_or(region.gap_width(x0_prime));
    if (!(radius > 0.0)) throw DomainError("window: radius must be positive");
    if (norm(x0_prime, d) + radius > region.r_solve() * (1.0 + 1e-12))
        throw DomainError("window: leaves the solve domain");
    Vec c{};
    for (int k = 0; k < d; ++k) c[k] = x0_prime[k];
    return LocalWindow{c, radius};
}

} // namespace narrowgap
