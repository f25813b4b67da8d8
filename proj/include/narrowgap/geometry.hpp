#ifndef NARROWGAP_GEOMETRY_HPP
#define NARROWGAP_GEOMETRY_HPP

#include <optional>
#include <string>
#include <vector>

#include "narrowgap/common.hpp"
#include "narrowgap/polynomial.hpp"

namespace narrowgap {

/// Top and bottom boundary graphs over the tangential ball.
///
/// Top surface is x_n = eps/2 + h1(x'), bottom x_n = -eps/2 + h2(x').
/// kappa0 and kappa1 are the claimed convexity and C^2 constants that
/// validation measures against.
struct GapProfile {
    Polynomial h1;
    Polynomial h2;
    double kappa0 = 1e-6;
    double kappa1 = 100.0;

    int tangential_dim() const { return h1.n_vars(); }
};

/// h(x') = a*|x'|^2 / 2 in `tangential_dim` variables.
Polynomial half_square_norm(int tangential_dim, double a = 1.0);

/// h1 = |x'|^2/2, h2 = -|x'|^2/2; gap width eps + |x'|^2.
GapProfile quadratic_gap(int tangential_dim);
/// h1 = h2 = 0. Violates strict convexity; only usable with the override.
GapProfile flat_gap(int tangential_dim);

struct ProfileEval {
    Jet h1;
    Jet h2;
};

/// Exact evaluation of both graphs and derivatives up to `order` (0..2).
/// Throws DomainError outside the closed unit ball.
ProfileEval eval_profile(const GapProfile& profile, const Vec& x_prime, int order);

/// The thin domain between the two graphs over B_{r_solve}(0').
class NarrowRegion {
public:
    NarrowRegion(int n, double epsilon, GapProfile profile, double r_solve = 1.0, double r_analyze = 0.5);

    int n() const { return n_; }
    int tangential_dim() const { return n_ - 1; }
    double epsilon() const { return epsilon_; }
    const GapProfile& profile() const { return profile_; }
    double r_solve() const { return r_solve_; }
    double r_analyze() const { return r_analyze_; }

    /// Same geometry at a different gap parameter.
    NarrowRegion with_epsilon(double epsilon) const;

    /// delta(x') = eps + h1(x') - h2(x'), exact.
    double gap_width(const Vec& x_prime) const;
    double top(const Vec& x_prime) const;
    double bottom(const Vec& x_prime) const;

private:
    int n_;
    double epsilon_;
    GapProfile profile_;
    double r_solve_;
    double r_analyze_;
};

struct HypothesisCheck {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double threshold = 0.0;
    bool overridden = false;
};

struct ValidationReport {
    std::vector<HypothesisCheck> checks;
    double min_eigenvalue = 0.0;     // of the Hessian of h1 - h2 at 0'
    double c2_norm = 0.0;            // ||h1||_C2 + ||h2||_C2, sampled on B_1
    double gap_ratio_min = 0.0;      // min delta/(eps+|x'|^2) on B_{r_solve}
    double gap_ratio_max = 0.0;      // max of the same ratio
    double gap_constant = 0.0;       // C with 1/C <= ratio <= C

    /// True when every check passed or was explicitly overridden.
    bool passed() const;
    const HypothesisCheck* find(const std::string& name) const;
};

/// Check the geometric hypotheses on the profile.
///
/// Failing checks are recorded, not thrown, except a non-positive gap
/// width which throws ValidationError. The convexity check may be marked
/// overridden when `allow_degenerate` is set.
ValidationReport validate_profile(const NarrowRegion& region, int samples_per_dim, double tol,
                                  bool allow_degenerate = false);

/// Sample points of the closed ball B_r(0') on a uniform lattice with
/// `samples_per_dim` points across the diameter.
std::vector<Vec> sample_ball(int dim, double r, int samples_per_dim);

/// C^2 norm sup|p| + sup|grad p| + sup|hess p| over sampled B_r(0').
double sampled_c2_norm(const Polynomial& p, int dim, double r, int samples_per_dim);

/// Analysis window {x in Omega_{r_analyze} : |x' - x0'| < radius}.
struct LocalWindow {
    Vec center{};
    double radius = 0.0;
};

/// Default radius is delta(x0'). Throws DomainError when |x0'| + s > r_solve.
LocalWindow window(const NarrowRegion& region, const Vec& x0_prime, std::optional<double> s = std::nullopt);

} // namespace narrowgap

#endif
