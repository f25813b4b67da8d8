#ifndef NARROWGAP_AUXILIARY_HPP
#define NARROWGAP_AUXILIARY_HPP

#include <string>
#include <utility>
#include <vector>

#include "narrowgap/common.hpp"
#include "narrowgap/geometry.hpp"
#include "narrowgap/operators.hpp"
#include "narrowgap/polynomial.hpp"

namespace narrowgap {

/// Dirichlet traces on the top and bottom graphs as functions of x'.
class BoundaryData {
public:
    /// Norms are sampled on B_1(0') with `samples_per_dim` points per axis
    /// (0 picks 1281 for one tangential variable, 161 for two).
    BoundaryData(std::vector<Polynomial> g_plus, std::vector<Polynomial> g_minus, int samples_per_dim = 0);

    /// Constant data a on top, b on bottom.
    static BoundaryData constant(int tangential_dim, const std::vector<double>& a, const std::vector<double>& b);

    int components() const { return static_cast<int>(g_plus_.size()); }
    int tangential_dim() const { return g_plus_.front().n_vars(); }
    const Polynomial& g_plus(int l) const { return g_plus_.at(l); }
    const Polynomial& g_minus(int l) const { return g_minus_.at(l); }

    /// ||g||_C2 = sup|g| + sup|grad g| + sup|hess g| with Euclidean/Frobenius
    /// norms over components, sampled on B_1.
    double c2_norm_plus() const { return c2_plus_; }
    double c2_norm_minus() const { return c2_minus_; }
    double c1_norm_plus() const { return c1_plus_; }
    double c1_norm_minus() const { return c1_minus_; }
    /// sup |grad g^l| and sup |hess g^l| over B_1 for one component.
    double grad_sup(int l, bool plus) const;
    double hess_sup(int l, bool plus) const;

    /// Euclidean norm over components of g+(x') - g-(x').
    double mismatch(const Vec& x_prime) const;
    double mismatch(int l, const Vec& x_prime) const;

    /// Copy keeping only component l (others zero).
    BoundaryData component_only(int l) const;
    BoundaryData scaled(double s) const;

private:
    void compute_norms();

    std::vector<Polynomial> g_plus_;
    std::vector<Polynomial> g_minus_;
    int samples_;
    double c2_plus_ = 0.0, c2_minus_ = 0.0, c1_plus_ = 0.0, c1_minus_ = 0.0;
    std::vector<double> grad_plus_, grad_minus_, hess_plus_, hess_minus_;
};

/// Normalized vertical coordinate (x_n - h2 + eps/2) / delta(x') with exact
/// derivatives up to `order`, in physical coordinates (index n-1 is x_n).
/// Throws DomainError if delta(x') <= 0.
Jet ubar(const NarrowRegion& region, const Vec& x, int order);

/// Linear interpolant of component l of the data across the gap; the
/// returned vector has N jets with only entry l nonzero.
std::vector<Jet> utilde(const NarrowRegion& region, const BoundaryData& data, int l, const Vec& x, int order);

/// Sum over l of utilde_l: every component interpolated.
std::vector<Jet> utilde_full(const NarrowRegion& region, const BoundaryData& data, const Vec& x, int order);

/// Right-hand side of the correction equation L w = f~, i.e. -L applied to
/// utilde_full, evaluated exactly.
std::vector<double> ftilde(const EllipticOperator& op, const NarrowRegion& region, const BoundaryData& data,
                           const Vec& x);

/// Smallest constants making each derivative-shape inequality hold over the
/// sampled points of the closed solve region. With s = eps + |x'|^2, m the
/// mismatch and G, H the sup of the data gradients and Hessians:
///   ubar_tangential_grad   |d' ubar| <= C |x'|/s
///   ubar_normal_upper/lower  1/C <= s |d_n ubar| <= C
///   ubar_tangential_hess   |d'd' ubar| <= C/s
///   ubar_mixed             |d' d_n ubar| <= C |x'|/s^2
///   utilde_tangential_grad |d' utilde| <= C (|x'| m/s + G)
///   utilde_normal_upper/lower  1/C <= s |d_n utilde|/m <= C
///   utilde_tangential_hess |d'd' utilde| <= C (m/s + (|x'|/s + 1) G + H)
///   utilde_mixed           |d' d_n utilde| <= C (|x'| m/s^2 + G/s)
/// and the *_normal_normal entries are max |d_nn| (zero up to rounding).
struct BoundShapeReport {
    double epsilon = 0.0;
    std::vector<std::pair<std::string, double>> constants;
    double get(const std::string& name) const;
};

/// Samples `samples` points across each tangential axis and `samples/2+1`
/// vertically.
BoundShapeReport check_derivative_bounds(const NarrowRegion& region, const BoundaryData& data, int samples);

} // namespace narrowgap

#endif
