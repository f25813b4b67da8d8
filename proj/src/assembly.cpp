#include "narrowgap/assembly.hpp"

#include <array>
#include <cmath>

namespace narrowgap {

namespace {

/// Linear functional of a scalar nodal field.
struct Stencil {
    int count = 0;
    std::array<int, 16> node{};
    std::array<double, 16> w{};

    void add(int nd, double wt)
    {
        node[count] = nd;
        w[count] = wt;
        ++count;
    }
    void add(const Stencil& s, double f)
    {
        for (int q = 0; q < s.count; ++q) add(s.node[q], f * s.w[q]);
    }
};

struct RowAccum {
    std::vector<std::pair<int, double>> entries; // (unknown, weight) of L u
    double rhs = 0.0;                            // discrete f
};

/// Physical derivative stencils from mapped ones: d_b = d_xi_b + T_b d_t, d_n = d_t / delta.
std::array<Stencil, kMaxDim> physical_derivatives(int d, const std::array<Stencil, kMaxDim>& s_xi, const Stencil& s_t,
                                                  const Vec& T, double delta)
{
    std::array<Stencil, kMaxDim> p;
    for (int b = 0; b < d; ++b) {
        p[b].add(s_xi[b], 1.0);
        p[b].add(s_t, T[b]);
    }
    p[d].add(s_t, 1.0 / delta);
    return p;
}

void check_finite(const EllipticOperator::Values& v)
{
    for (const auto* arr : {&v.A, &v.B, &v.C, &v.D})
        for (double x : *arr)
            if (!std::isfinite(x)) throw DomainError("assembly: non-finite coefficient value");
}

/// rows[i] += factor * (A^{alpha beta}_{ij} P_beta u^j + B^alpha_{ij} avg u^j).
void add_flux(const EllipticOperator& op, const EllipticOperator::Values& v, int alpha,
              const std::array<Stencil, kMaxDim>& p, const Stencil& avg, double factor, std::vector<RowAccum>& rows,
              int nodes)
{
    const int n = op.n();
    const int N = op.N();
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            for (int beta = 0; beta < n; ++beta) {
                const double a = v.A[op.a_index(i, j, alpha, beta)];
                if (a == 0.0) continue;
                for (int q = 0; q < p[beta].count; ++q)
                    rows[i].entries.emplace_back(j * nodes + p[beta].node[q], factor * a * p[beta].w[q]);
            }
            const double b = v.B[op.v_index(i, j, alpha)];
            if (b == 0.0) continue;
            for (int q = 0; q < avg.count; ++q)
                rows[i].entries.emplace_back(j * nodes + avg.node[q], factor * b * avg.w[q]);
        }
    }
}

} // namespace

LinearSystem assemble(const EllipticOperator& op, const MappedGrid& grid, const BoundaryValues& boundary,
                      const NodalSource& source)
{
    if (op.n() != grid.n()) throw DomainError("assembly: operator and grid dimensions differ");
    const int n = grid.n();
    const int d = n - 1;
    const int N = op.N();
    const int nodes = grid.nodes();
    const int nt = grid.nt();
    const double h = grid.h();
    const double ht = grid.ht();
    const double eps = grid.region().epsilon();
    const GapProfile& prof = grid.region().profile();
    const bool lower = op.has_lower_order();

    LinearSystem sys;
    sys.components = N;
    sys.nodes = nodes;
    sys.dirichlet.assign(static_cast<std::size_t>(N) * nodes, 0);
    sys.rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N) * nodes);

    // Boundary values first, so interior rows can eliminate them.
    std::vector<double> bval(static_cast<std::size_t>(N) * nodes, 0.0);
    std::vector<double> buf(N);
    for (int c = 0; c < grid.columns(); ++c) {
        const bool lat = grid.lateral(c);
        for (int k = 0; k < nt; ++k) {
            if (!lat && k != 0 && k != nt - 1) continue;
            const int nd = grid.node(c, k);
            boundary(grid.physical(c, k), grid.t(k), buf);
            for (int l = 0; l < N; ++l) {
                if (!std::isfinite(buf[l])) throw DomainError("assembly: non-finite boundary value");
                const int u = sys.unknown(l, nd);
                sys.dirichlet[u] = 1;
                bval[u] = buf[l];
            }
        }
    }

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(N) * nodes * (N * (d == 1 ? 9 : 19)));
    for (int u = 0; u < sys.size(); ++u) {
        if (!sys.dirichlet[u]) continue;
        triplets.emplace_back(u, u, 1.0);
        sys.rhs[u] = bval[u];
    }

    EllipticOperator::Values vals;
    std::vector<RowAccum> rows(N);

    for (int c = 0; c < grid.columns(); ++c) {
        if (grid.lateral(c)) continue;
        const double delta_c = grid.delta(c);
        for (int k = 1; k < nt - 1; ++k) {
            for (auto& r : rows) {
                r.entries.clear();
                r.rhs = 0.0;
            }

            // Tangential faces.
            for (int a = 0; a < d; ++a) {
                for (int side : {-1, 1}) {
                    const int nb = grid.neighbor(c, a, side);
                    const int lo = side < 0 ? nb : c;
                    const int hi = side < 0 ? c : nb;
                    Vec xf{};
                    for (int b = 0; b < d; ++b) xf[b] = 0.5 * (grid.column_point(lo)[b] + grid.column_point(hi)[b]);
                    const Jet j1 = prof.h1.jet(xf, 1);
                    const Jet j2 = prof.h2.jet(xf, 1);
                    const double delta_f = eps + j1.value - j2.value;
                    if (!(delta_f > 0.0)) throw DomainError("assembly: non-positive gap width at a face");
                    const double tk = grid.t(k);
                    Vec T{};
                    for (int b = 0; b < d; ++b) T[b] = -(j2.grad[b] + tk * (j1.grad[b] - j2.grad[b])) / delta_f;
                    xf[d] = -0.5 * eps + j2.value + tk * delta_f;

                    std::array<Stencil, kMaxDim> s_xi;
                    s_xi[a].add(grid.node(hi, k), 1.0 / h);
                    s_xi[a].add(grid.node(lo, k), -1.0 / h);
                    for (int b = 0; b < d; ++b) {
                        if (b == a) continue;
                        for (int col : {lo, hi}) {
                            s_xi[b].add(grid.node(grid.neighbor(col, b, 1), k), 0.25 / h);
                            s_xi[b].add(grid.node(grid.neighbor(col, b, -1), k), -0.25 / h);
                        }
                    }
                    Stencil s_t;
                    for (int col : {lo, hi}) {
                        s_t.add(grid.node(col, k + 1), 0.25 / ht);
                        s_t.add(grid.node(col, k - 1), -0.25 / ht);
                    }
                    Stencil avg;
                    avg.add(grid.node(lo, k), 0.5);
                    avg.add(grid.node(hi, k), 0.5);

                    op.evaluate(xf, vals);
                    check_finite(vals);
                    const auto p = physical_derivatives(d, s_xi, s_t, T, delta_f);
                    add_flux(op, vals, a, p, avg, side * delta_f / h, rows, nodes);
                }
            }

            // Vertical faces.
            const Vec x_lo = grid.physical(c, k - 1);
            const Vec x_mid = grid.physical(c, k);
            const Vec x_hi = grid.physical(c, k + 1);
            for (int side : {-1, 1}) {
                const int kl = side < 0 ? k - 1 : k;
                const double tf = 0.5 * (grid.t(kl) + grid.t(kl + 1));
                Vec xf = grid.column_point(c);
                xf[d] = side < 0 ? 0.5 * (x_lo[d] + x_mid[d]) : 0.5 * (x_mid[d] + x_hi[d]);
                Vec T{};
                for (int b = 0; b < d; ++b) T[b] = -(grid.dh2(c)[b] + tf * grid.ddelta(c)[b]) / delta_c;

                std::array<Stencil, kMaxDim> s_xi;
                for (int b = 0; b < d; ++b) {
                    for (int kk : {kl, kl + 1}) {
                        s_xi[b].add(grid.node(grid.neighbor(c, b, 1), kk), 0.25 / h);
                        s_xi[b].add(grid.node(grid.neighbor(c, b, -1), kk), -0.25 / h);
                    }
                }
                Stencil s_t;
                s_t.add(grid.node(c, kl + 1), 1.0 / ht);
                s_t.add(grid.node(c, kl), -1.0 / ht);
                Stencil avg;
                avg.add(grid.node(c, kl), 0.5);
                avg.add(grid.node(c, kl + 1), 0.5);

                op.evaluate(xf, vals);
                check_finite(vals);
                const auto p = physical_derivatives(d, s_xi, s_t, T, delta_c);
                // Contravariant flux through a t = const face: F^n + delta * sum_b T_b F^b.
                add_flux(op, vals, d, p, avg, side / ht, rows, nodes);
                for (int b = 0; b < d; ++b)
                    if (T[b] != 0.0) add_flux(op, vals, b, p, avg, side * delta_c * T[b] / ht, rows, nodes);
            }

            // Non-divergence terms and the source, weighted by the Jacobian.
            if (lower) {
                op.evaluate(x_mid, vals);
                check_finite(vals);
                std::array<Stencil, kMaxDim> s_xi;
                for (int b = 0; b < d; ++b) {
                    s_xi[b].add(grid.node(grid.neighbor(c, b, 1), k), 0.5 / h);
                    s_xi[b].add(grid.node(grid.neighbor(c, b, -1), k), -0.5 / h);
                }
                Stencil s_t;
                s_t.add(grid.node(c, k + 1), 0.5 / ht);
                s_t.add(grid.node(c, k - 1), -0.5 / ht);
                const auto p = physical_derivatives(d, s_xi, s_t, grid.metric(c, k), delta_c);
                const int self = grid.node(c, k);
                for (int i = 0; i < N; ++i) {
                    for (int j = 0; j < N; ++j) {
                        for (int beta = 0; beta < n; ++beta) {
                            const double cc = vals.C[op.v_index(i, j, beta)];
                            if (cc == 0.0) continue;
                            for (int q = 0; q < p[beta].count; ++q)
                                rows[i].entries.emplace_back(j * nodes + p[beta].node[q],
                                                             delta_c * cc * p[beta].w[q]);
                        }
                        const double dd = vals.D[i * N + j];
                        if (dd != 0.0) rows[i].entries.emplace_back(j * nodes + self, delta_c * dd);
                    }
                }
            }
            if (source) {
                source(x_mid, buf);
                for (int i = 0; i < N; ++i) {
                    if (!std::isfinite(buf[i])) throw DomainError("assembly: non-finite source value");
                    rows[i].rhs = delta_c * buf[i];
                }
            }

            // Emit negated rows with Dirichlet columns moved to the right-hand side.
            const int nd = grid.node(c, k);
            for (int i = 0; i < N; ++i) {
                const int row = sys.unknown(i, nd);
                double rhs = -rows[i].rhs;
                for (const auto& [col, w] : rows[i].entries) {
                    if (sys.dirichlet[col])
                        rhs += w * bval[col];
                    else
                        triplets.emplace_back(row, col, -w);
                }
                sys.rhs[row] = rhs;
            }
        }
    }

    sys.matrix.resize(sys.size(), sys.size());
    sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
    sys.matrix.makeCompressed();
    return sys;
}

BoundaryValues closure_values(const BoundaryData& data, LateralClosure closure)
{
    return [&data, closure](const Vec& x, double t, std::span<double> out) {
        for (int l = 0; l < data.components(); ++l) {
            const double gp = data.g_plus(l).value(x);
            const double gm = data.g_minus(l).value(x);
            if (t >= 1.0)
                out[l] = gp;
            else if (t <= 0.0)
                out[l] = gm;
            else if (closure == LateralClosure::utilde)
                out[l] = gm + (gp - gm) * t;
            else
                out[l] = 0.5 * (gp + gm);
        }
    };
}

LinearSystem assemble(const EllipticOperator& op, const MappedGrid& grid, const BoundaryData& data,
                      LateralClosure closure, const NodalSource& source)
{
    if (data.components() != op.N()) throw DomainError("assembly: data and operator component counts differ");
    if (data.tangential_dim() != grid.tangential_dim())
        throw DomainError("assembly: data and grid dimensions differ");
    return assemble(op, grid, closure_values(data, closure), source);
}

} // namespace narrowgap
