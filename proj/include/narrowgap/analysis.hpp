#ifndef NARROWGAP_ANALYSIS_HPP
#define NARROWGAP_ANALYSIS_HPP

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "narrowgap/auxiliary.hpp"
#include "narrowgap/linear_solver.hpp"

namespace narrowgap {

/// Physical gradients of every component at every node.
struct GradientField {
    std::shared_ptr<const MappedGrid> grid;
    int components = 0;
    std::vector<double> data; // ((comp * nodes + node) * n + alpha)

    double at(int comp, int node, int alpha) const
    {
        return data[(static_cast<std::size_t>(comp) * grid->nodes() + node) * grid->n() + alpha];
    }
    /// Frobenius norm over components and directions.
    double norm(int node) const;
    /// Euclidean norm over components of the x_n derivative.
    double normal_norm(int node) const;
};

/// Second-order recovery: central differences in (x', t), one-sided
/// three-point stencils on the grid boundary, exact metric terms.
GradientField gradient(std::shared_ptr<const MappedGrid> grid, int components, const std::vector<double>& values);
GradientField gradient(const SolutionField& solution);

/// Nodal values of the interpolant utilde (component-major); exact because
/// the mapped height equals ubar at every node.
std::vector<double> nodal_utilde(const MappedGrid& grid, const BoundaryData& data);

/// Per-column quadrature weights for the tangential set
/// {|x' - center| <= radius} intersected with {|x'| <= clip}. With one
/// tangential variable partial cells are integrated exactly for the linear
/// interpolant; with two a node indicator times trapezoid weights is used.
std::vector<double> tangential_weights(const MappedGrid& grid, const Vec& center, double radius, double clip);

/// Integral over the tangential set times the full height of a nodal
/// density q, with Jacobian delta: sum_c w_c sum_k w_k q(c,k) delta_c.
double integrate(const MappedGrid& grid, const std::vector<double>& column_weights, const std::vector<double>& q);

/// L2 norm over the ball of radius r_solve.
double l2_norm(const MappedGrid& grid, int components, const std::vector<double>& values);

/// Integral of |grad w|^2 over {|x' - center| < radius} within Omega_{r_analyze}.
double energy(const GradientField& grad_w, const Vec& center, double radius);
/// Integral of |grad w|^2 over Omega_{r_analyze}.
double energy_half(const GradientField& grad_w);

/// F(s) for each s in `radii`, windows centred at x0'.
std::vector<std::pair<double, double>> local_energy_profile(const GradientField& grad_w, const Vec& x0_prime,
                                                           const std::vector<double>& radii);

/// Smallest C with |grad u| <= C [ |m|/(eps+|x'|^2) + ||g+||_C2 + ||g-||_C2 + ||u||_L2 ]
/// over nodes with |x'| <= R0.
double sup_bound_constant(const GradientField& grad_u, const BoundaryData& data, double u_l2, double R0);

/// min over interior centreline nodes of |grad u| eps / max_l |m_l(0')|;
/// nullopt when the data match at 0'.
std::optional<double> centerline_lower_constant(const GradientField& grad_u, const BoundaryData& data);

struct PointwiseFactors {
    std::optional<double> m_inner; // nodes with |x'| <= sqrt(eps)
    std::optional<double> m_outer; // nodes with sqrt(eps) < |x'| < R0
};

/// Smallest constants in the two pointwise correction bounds, with budget
/// ||g+||_C2 + ||g-||_C2 + ||w||_L2.
PointwiseFactors pointwise_w_check(const GradientField& grad_w, const BoundaryData& data, double w_l2, double R0);

enum class SupRegion {
    inner,  // |x'| <= R0
    origin, // |x'| <= eps, the neighbourhood of the closest point
};

struct AnalysisOptions {
    double R0 = 0.25;
    SupRegion sup_region = SupRegion::inner;
    std::string scenario = "custom";
};

/// Empirical constants of the correction estimates; field names are the
/// report's lemma_constants keys.
struct LemmaConstants {
    /// energy_half / B with B = ||g+||_C2^2 + ||g-||_C2^2 + ||w||^2.
    double k213 = 0.0;
    /// F(delta(0')) / (eps^(n-1) (|m(0')|^2 + eps B)).
    double k219 = 0.0;
    /// F(delta(x0')) / (|x0'|^(2(n-1)) (|m(x0')|^2 + |x0'|^2 B)) at x0' = (2 sqrt(eps), 0).
    std::optional<double> k220;
    std::optional<double> k225; // m_inner
    std::optional<double> k226; // m_outer
};

struct BoundReport {
    double epsilon = 0.0;
    double sup_grad = 0.0;
    /// Same sup restricted to nodes with even lattice indices, i.e. the nodes
    /// of the half-resolution grid.
    double sup_grad_shared = 0.0;
    double center_grad = 0.0; // |grad u| at x' = 0', t = 1/2
    double C_emp = 0.0;
    std::optional<double> c_low;
    double energy_half = 0.0;
    double F_delta0 = 0.0;
    LemmaConstants lemma;
    /// Window energy at x0' = (2 sqrt(eps), 0') with radius delta(x0'), and |x0'|.
    std::optional<double> F_x0;
    double x0_norm = 0.0;
    /// max over columns with |x'| <= R0 of (eps+|x'|^2)|d_n u(x', t=1/2)|/|m(x')|.
    std::optional<double> normal_profile;
    double u_l2 = 0.0;
    double w_l2 = 0.0;
    int nx = 0;
    int nt = 0;
    double R0 = 0.25;
    std::string scenario;
};

BoundReport analyze(const SolutionField& u, const BoundaryData& data, const AnalysisOptions& options);

/// max |u_full - sum_l v_l| over all nodes and components.
double superposition_check(const EllipticOperator& op, std::shared_ptr<const MappedGrid> grid,
                           const BoundaryData& data, const SolveOptions& options = {});

/// Least-squares fit of log M = slope * log eps + intercept.
struct RateFit {
    std::vector<std::pair<double, double>> points;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    /// r2 >= 0.98.
    bool conclusive = false;
};

/// Needs at least 3 points with strictly decreasing eps and positive values;
/// throws DomainError otherwise.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

/// max/min of the positive entries; nullopt when fewer than two.
std::optional<double> spread(const std::vector<std::optional<double>>& values);

} // namespace narrowgap

#endif
