#ifndef NARROWGAP_OPERATORS_HPP
#define NARROWGAP_OPERATORS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "narrowgap/common.hpp"
#include "narrowgap/geometry.hpp"
#include "narrowgap/polynomial.hpp"

namespace narrowgap {

/// Coefficients of the divergence-form system
///
///   d_a( A[i][j][a][b] d_b u^j + B[i][j][a] u^j ) + C[i][j][b] d_b u^j + D[i][j] u^j
///
/// in n space dimensions with N unknown components. Indices are 0-based;
/// every entry is a polynomial in x_1..x_n.
class EllipticOperator {
public:
    EllipticOperator(int n, int N);

    int n() const { return n_; }
    int N() const { return N_; }

    const Polynomial& A(int i, int j, int a, int b) const { return A_[a_index(i, j, a, b)]; }
    const Polynomial& B(int i, int j, int a) const { return B_[v_index(i, j, a)]; }
    const Polynomial& C(int i, int j, int b) const { return C_[v_index(i, j, b)]; }
    const Polynomial& D(int i, int j) const { return D_[i * N_ + j]; }

    void set_A(int i, int j, int a, int b, Polynomial p);
    void set_B(int i, int j, int a, Polynomial p);
    void set_C(int i, int j, int b, Polynomial p);
    void set_D(int i, int j, Polynomial p);

    /// True when any of B, C, D is nonzero.
    bool has_lower_order() const;
    bool all_constant() const;

    double lambda_claim = 1.0;
    double Lambda_claim = 1.0;
    double kappa2_claim = 1.0;

    /// Coefficient values at one point, laid out like the storage.
    struct Values {
        std::vector<double> A, B, C, D;
    };
    void evaluate(const Vec& x, Values& out) const;

    std::span<const Polynomial> A_entries() const { return A_; }
    std::span<const Polynomial> B_entries() const { return B_; }
    std::span<const Polynomial> C_entries() const { return C_; }
    std::span<const Polynomial> D_entries() const { return D_; }

    int a_index(int i, int j, int a, int b) const { return ((i * N_ + j) * n_ + a) * n_ + b; }
    int v_index(int i, int j, int a) const { return (i * N_ + j) * n_ + a; }

private:
    void check(const Polynomial& p) const;

    int n_;
    int N_;
    std::vector<Polynomial> A_;
    std::vector<Polynomial> B_;
    std::vector<Polynomial> C_;
    std::vector<Polynomial> D_;
};

EllipticOperator make_laplace(int n);

/// Lame system mu*Lap(u) + (lambda + mu)*grad(div u), N = n, written with the
/// fully symmetric elasticity tensor
///   A[i][j][a][b] = lambda d_ai d_bj + mu (d_ab d_ij + d_aj d_ib).
/// Requires mu > 0 and lambda + mu >= 0.
EllipticOperator make_lame(int n, double lame_lambda, double lame_mu);

/// Check A[i][j][a][b] == A[j][i][b][a] == A[a][j][i][b] at a point.
bool has_elasticity_symmetry(const EllipticOperator& op, const Vec& x, double tol = 0.0);

struct EllipticityGrid {
    int nx = 33;
    int nt = 17;
};

/// Randomized Rayleigh-quotient search for the weak ellipticity constant.
///
/// Each trial draws a zero-trace test field made of tensor-product sine
/// modes in the mapped coordinates (x', t) and evaluates
/// int A d xi d xi / int |grad xi|^2 by trapezoidal quadrature with the
/// Jacobian delta(x'). Returns the minimum quotient.
double estimate_ellipticity(const EllipticOperator& op, const NarrowRegion& region, const EllipticityGrid& grid,
                            int trials, std::uint64_t seed);

struct BoundsEstimate {
    double Lambda = 0.0; // sup |A entries|
    double kappa2 = 0.0; // ||A||_C2 + ||B||_C2 + ||C||_C2 + ||D||_C2
};

/// Dense sampling of the coefficient magnitudes over the solve region.
BoundsEstimate estimate_bounds(const EllipticOperator& op, const NarrowRegion& region, int samples);

/// Coefficients in the stretched variables y with x' = delta*y' + x0', x_n = delta*y_n:
/// A unchanged, B and C scaled by delta, D by delta^2 (all composed).
EllipticOperator rescale_coefficients(const EllipticOperator& op, const Vec& x0_prime, double delta);

/// Exact application of the operator to a field given by per-component jets
/// (value, gradient, Hessian in physical coordinates). Returns the N-vector L v.
std::vector<double> apply_operator(const EllipticOperator& op, const Vec& x, std::span<const Jet> v);

} // namespace narrowgap

#endif
