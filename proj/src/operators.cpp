#include "narrowgap/operators.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <random>

namespace narrowgap {

EllipticOperator::EllipticOperator(int n, int N)
    : n_(n), N_(N), A_(N * N * n * n, Polynomial(n)), B_(N * N * n, Polynomial(n)), C_(N * N * n, Polynomial(n)),
      D_(N * N, Polynomial(n))
{
    if (n < 2 || n > 3) throw DomainError("operator: dimension must be 2 or 3");
    if (N < 1) throw DomainError("operator: need at least one component");
}

void EllipticOperator::check(const Polynomial& p) const
{
    if (p.n_vars() != n_) throw DomainError("operator: coefficient must be a polynomial in x1..xn");
    for (const auto& t : p.terms())
        if (!std::isfinite(t.coeff)) throw DomainError("operator: non-finite coefficient");
}

void EllipticOperator::set_A(int i, int j, int a, int b, Polynomial p)
{
    check(p);
    A_.at(a_index(i, j, a, b)) = std::move(p);
}

void EllipticOperator::set_B(int i, int j, int a, Polynomial p)
{
    check(p);
    B_.at(v_index(i, j, a)) = std::move(p);
}

void EllipticOperator::set_C(int i, int j, int b, Polynomial p)
{
    check(p);
    C_.at(v_index(i, j, b)) = std::move(p);
}

void EllipticOperator::set_D(int i, int j, Polynomial p)
{
    check(p);
    D_.at(i * N_ + j) = std::move(p);
}

bool EllipticOperator::has_lower_order() const
{
    auto nonzero = [](const std::vector<Polynomial>& v) {
        return std::any_of(v.begin(), v.end(), [](const Polynomial& p) { return !p.is_zero(); });
    };
    return nonzero(B_) || nonzero(C_) || nonzero(D_);
}

bool EllipticOperator::all_constant() const
{
    auto constant = [](const std::vector<Polynomial>& v) {
        return std::all_of(v.begin(), v.end(), [](const Polynomial& p) { return p.is_constant(); });
    };
    return constant(A_) && constant(B_) && constant(C_) && constant(D_);
}

void EllipticOperator::evaluate(const Vec& x, Values& out) const
{
    auto fill = [&x](const std::vector<Polynomial>& src, std::vector<double>& dst) {
        dst.resize(src.size());
        for (std::size_t k = 0; k < src.size(); ++k) dst[k] = src[k].value(x);
    };
    fill(A_, out.A);
    fill(B_, out.B);
    fill(C_, out.C);
    fill(D_, out.D);
}

EllipticOperator make_laplace(int n)
{
    EllipticOperator op(n, 1);
    for (int a = 0; a < n; ++a) op.set_A(0, 0, a, a, Polynomial::constant(n, 1.0));
    op.lambda_claim = 1.0;
    op.Lambda_claim = 1.0;
    op.kappa2_claim = 1.0;
    return op;
}

EllipticOperator make_lame(int n, double lame_lambda, double lame_mu)
{
    if (!(lame_mu > 0.0) || !(lame_lambda + lame_mu >= 0.0) || !std::isfinite(lame_lambda))
        throw DomainError("lame: need mu > 0 and lambda + mu >= 0");
    EllipticOperator op(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    const double v = lame_lambda * (a == i) * (b == j) + lame_mu * ((a == b) * (i == j) + (a == j) * (i == b));
                    if (v != 0.0) op.set_A(i, j, a, b, Polynomial::constant(n, v));
                }
    op.lambda_claim = lame_mu;
    op.Lambda_claim = lame_lambda + 2.0 * lame_mu;
    op.kappa2_claim = std::max({std::abs(lame_lambda), lame_mu, std::abs(lame_lambda + 2.0 * lame_mu)});
    return op;
}

bool has_elasticity_symmetry(const EllipticOperator& op, const Vec& x, double tol)
{
    if (op.N() != op.n()) return false;
    const int n = op.n();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    const double v = op.A(i, j, a, b).value(x);
                    if (std::abs(v - op.A(j, i, b, a).value(x)) > tol) return false;
                    if (std::abs(v - op.A(a, j, i, b).value(x)) > tol) return false;
                }
    return true;
}

namespace {

// Column coordinates of a uniform lattice on [-r, r]^d with m points per axis.
std::vector<Vec> lattice_columns(int d, double r, int m)
{
    std::vector<Vec> cols;
    const double h = 2.0 * r / (m - 1);
    if (d == 1) {
        for (int i = 0; i < m; ++i) cols.push_back(Vec{-r + i * h, 0.0, 0.0});
    } else {
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i) cols.push_back(Vec{-r + i * h, -r + j * h, 0.0});
    }
    return cols;
}

double trapezoid_weight(int i, int m, double h)
{
    return (i == 0 || i == m - 1) ? 0.5 * h : h;
}

} // namespace

double estimate_ellipticity(const EllipticOperator& op, const NarrowRegion& region, const EllipticityGrid& grid,
                            int trials, std::uint64_t seed)
{
    if (trials < 32) throw std::invalid_argument("estimate_ellipticity: need at least 32 trials");
    if (op.n() != region.n()) throw DomainError("estimate_ellipticity: dimension mismatch");
    const int n = op.n();
    const int d = n - 1;
    const int N = op.N();
    const double r = region.r_solve();
    const int m = grid.nx;
    const int nt = grid.nt;
    const double h = 2.0 * r / (m - 1);
    const double ht = 1.0 / (nt - 1);
    const GapProfile& prof = region.profile();
    constexpr int kModes = 3;
    const double pi = std::numbers::pi;

    // Quadrature nodes with physical coordinates, metric terms and weights.
    struct Node {
        Vec xi;     // tangential mapped coordinates
        double t;
        double delta;
        Vec dT;     // d t / d x_a for tangential a
        double weight;
        std::vector<double> A;
    };
    std::vector<Node> nodes;
    const auto cols = lattice_columns(d, r, m);
    for (std::size_t c = 0; c < cols.size(); ++c) {
        const Vec& xp = cols[c];
        const Jet j1 = prof.h1.jet(xp, 1);
        const Jet j2 = prof.h2.jet(xp, 1);
        const double delta = region.epsilon() + j1.value - j2.value;
        if (!(delta > 0.0)) throw DomainError("estimate_ellipticity: non-positive gap width");
        double wcol = trapezoid_weight(static_cast<int>(c % m), m, h);
        if (d == 2) wcol *= trapezoid_weight(static_cast<int>(c / m), m, h);
        for (int k = 0; k < nt; ++k) {
            Node nd;
            nd.xi = xp;
            nd.t = k * ht;
            nd.delta = delta;
            for (int a = 0; a < d; ++a) nd.dT[a] = -(j2.grad[a] + nd.t * (j1.grad[a] - j2.grad[a])) / delta;
            nd.weight = wcol * trapezoid_weight(k, nt, ht) * delta;
            Vec x = xp;
            x[n - 1] = -0.5 * region.epsilon() + j2.value + nd.t * delta;
            nd.A.resize(op.A_entries().size());
            for (std::size_t e = 0; e < nd.A.size(); ++e) nd.A[e] = op.A_entries()[e].value(x);
            nodes.push_back(std::move(nd));
        }
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 2.0);

    // coefficient layout: [component][p][q][s] with s only used for d == 2
    const int per_comp = kModes * kModes * (d == 2 ? kModes : 1);
    std::vector<double> coef(N * per_comp);
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> grad(N * n);

    for (int trial = 0; trial < trials; ++trial) {
        const double decay = uniform(rng);
        for (int i = 0; i < N; ++i)
            for (int q = 0; q < per_comp; ++q) {
                const int p1 = q % kModes + 1;
                const int p2 = (q / kModes) % kModes + 1;
                const int p3 = q / (kModes * kModes) + 1;
                coef[i * per_comp + q] = normal(rng) * std::pow(1.0 / (p1 * p2 * p3), decay);
            }

        double num = 0.0, den = 0.0;
        for (const Node& nd : nodes) {
            std::fill(grad.begin(), grad.end(), 0.0);
            for (int q = 0; q < per_comp; ++q) {
                const int pt = q % kModes + 1;             // vertical mode
                const int pa = (q / kModes) % kModes + 1;  // first tangential mode
                const int pb = q / (kModes * kModes) + 1;  // second tangential mode
                const double at = pt * pi, aa = pa * pi / (2.0 * r), ab = pb * pi / (2.0 * r);
                const double st = std::sin(at * nd.t), ct = at * std::cos(at * nd.t);
                const double sa = std::sin(aa * (nd.xi[0] + r)), ca = aa * std::cos(aa * (nd.xi[0] + r));
                double sb = 1.0, cb = 0.0;
                if (d == 2) {
                    sb = std::sin(ab * (nd.xi[1] + r));
                    cb = ab * std::cos(ab * (nd.xi[1] + r));
                }
                // derivatives in mapped coordinates
                const double d_t = sa * sb * ct;
                const double d_xi0 = ca * sb * st;
                const double d_xi1 = sa * cb * st;
                for (int i = 0; i < N; ++i) {
                    const double c = coef[i * per_comp + q];
                    if (c == 0.0) continue;
                    grad[i * n + 0] += c * (d_xi0 + nd.dT[0] * d_t);
                    if (d == 2) grad[i * n + 1] += c * (d_xi1 + nd.dT[1] * d_t);
                    grad[i * n + (n - 1)] += c * d_t / nd.delta;
                }
            }
            double quad = 0.0, sq = 0.0;
            for (int i = 0; i < N; ++i)
                for (int a = 0; a < n; ++a) {
                    const double gia = grad[i * n + a];
                    sq += gia * gia;
                    for (int j = 0; j < N; ++j)
                        for (int b = 0; b < n; ++b) quad += nd.A[op.a_index(i, j, a, b)] * gia * grad[j * n + b];
                }
            num += nd.weight * quad;
            den += nd.weight * sq;
        }
        if (!(den > 1e-300)) continue; // degenerate test field
        best = std::min(best, num / den);
    }
    if (!std::isfinite(best)) throw DomainError("estimate_ellipticity: every test field was degenerate");
    return best;
}

BoundsEstimate estimate_bounds(const EllipticOperator& op, const NarrowRegion& region, int samples)
{
    const int n = op.n();
    const int d = n - 1;
    const int m = std::max(samples, 2);
    const int nt = std::max(samples / 4, 5);
    const auto cols = lattice_columns(d, region.r_solve(), m);

    struct Sup {
        double v = 0.0, g = 0.0, h = 0.0;
        double total() const { return v + g + h; }
    };
    Sup sa, sb, sc, sd;
    double Lambda = 0.0;
    auto accumulate = [&](std::span<const Polynomial> entries, const Vec& x, Sup& s, bool track_lambda) {
        for (const auto& p : entries) {
            if (p.is_zero()) continue;
            const Jet j = p.jet(x, 2);
            s.v = std::max(s.v, std::abs(j.value));
            s.g = std::max(s.g, norm(j.grad, n));
            s.h = std::max(s.h, frobenius(j.hess, n));
            if (track_lambda) Lambda = std::max(Lambda, std::abs(j.value));
        }
    };
    for (const Vec& xp : cols) {
        if (norm(xp, d) > region.r_solve() * (1.0 + 1e-12) && d == 2) continue;
        const double lo = region.bottom(xp);
        const double delta = region.gap_width(xp);
        for (int k = 0; k < nt; ++k) {
            Vec x = xp;
            x[n - 1] = lo + delta * k / (nt - 1);
            accumulate(op.A_entries(), x, sa, true);
            accumulate(op.B_entries(), x, sb, false);
            accumulate(op.C_entries(), x, sc, false);
            accumulate(op.D_entries(), x, sd, false);
        }
    }
    return BoundsEstimate{Lambda, sa.total() + sb.total() + sc.total() + sd.total()};
}

EllipticOperator rescale_coefficients(const EllipticOperator& op, const Vec& x0_prime, double delta)
{
    if (!(delta > 0.0)) throw DomainError("rescale_coefficients: delta must be positive");
    const int n = op.n();
    const int N = op.N();
    Vec scale{}, shift{};
    for (int k = 0; k < n; ++k) scale[k] = delta;
    for (int k = 0; k < n - 1; ++k) shift[k] = x0_prime[k];
    EllipticOperator out(n, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            for (int a = 0; a < n; ++a) {
                for (int b = 0; b < n; ++b) out.set_A(i, j, a, b, op.A(i, j, a, b).compose_affine(scale, shift));
                out.set_B(i, j, a, op.B(i, j, a).compose_affine(scale, shift) * delta);
                out.set_C(i, j, a, op.C(i, j, a).compose_affine(scale, shift) * delta);
            }
            out.set_D(i, j, op.D(i, j).compose_affine(scale, shift) * (delta * delta));
        }
    out.lambda_claim = op.lambda_claim;
    out.Lambda_claim = op.Lambda_claim;
    out.kappa2_claim = op.kappa2_claim;
    return out;
}

std::vector<double> apply_operator(const EllipticOperator& op, const Vec& x, std::span<const Jet> v)
{
    const int n = op.n();
    const int N = op.N();
    if (static_cast<int>(v.size()) != N) throw std::invalid_argument("apply_operator: component count mismatch");
    std::vector<double> out(N, 0.0);
    for (int i = 0; i < N; ++i) {
        double s = 0.0;
        for (int j = 0; j < N; ++j) {
            const Jet& vj = v[j];
            for (int a = 0; a < n; ++a) {
                for (int b = 0; b < n; ++b) {
                    const Polynomial& A = op.A(i, j, a, b);
                    if (A.is_zero()) continue;
                    const Jet aj = A.jet(x, 1);
                    s += aj.grad[a] * vj.grad[b] + aj.value * vj.hess[a][b];
                }
                const Polynomial& B = op.B(i, j, a);
                if (!B.is_zero()) {
                    const Jet bj = B.jet(x, 1);
                    s += bj.grad[a] * vj.value + bj.value * vj.grad[a];
                }
                const Polynomial& C = op.C(i, j, a);
                if (!C.is_zero()) s += C.value(x) * vj.grad[a];
            }
            const Polynomial& D = op.D(i, j);
            if (!D.is_zero()) s += D.value(x) * vj.value;
        }
        out[i] = s;
    }
    return out;
}

} // namespace narrowgap
