#include "narrowgap/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace narrowgap {

double GradientField::norm(int node) const
{
    const int n = grid->n();
    double s = 0.0;
    for (int j = 0; j < components; ++j)
        for (int a = 0; a < n; ++a) s += at(j, node, a) * at(j, node, a);
    return std::sqrt(s);
}

double GradientField::normal_norm(int node) const
{
    const int n = grid->n();
    double s = 0.0;
    for (int j = 0; j < components; ++j) s += at(j, node, n - 1) * at(j, node, n - 1);
    return std::sqrt(s);
}

GradientField gradient(std::shared_ptr<const MappedGrid> grid, int components, const std::vector<double>& values)
{
    const MappedGrid& g = *grid;
    const int n = g.n();
    const int d = n - 1;
    const int nodes = g.nodes();
    const int nt = g.nt();
    const int nx = g.nx();
    const double h = g.h();
    const double ht = g.ht();

    GradientField out;
    out.grid = grid;
    out.components = components;
    out.data.assign(static_cast<std::size_t>(components) * nodes * n, 0.0);

    for (int j = 0; j < components; ++j) {
        const double* u = values.data() + static_cast<std::size_t>(j) * nodes;
        for (int c = 0; c < g.columns(); ++c) {
            const auto idx = g.column_indices(c);
            const double delta = g.delta(c);
            for (int k = 0; k < nt; ++k) {
                const int nd = g.node(c, k);
                double ut;
                if (k == 0)
                    ut = (-3.0 * u[nd] + 4.0 * u[nd + 1] - u[nd + 2]) / (2.0 * ht);
                else if (k == nt - 1)
                    ut = (3.0 * u[nd] - 4.0 * u[nd - 1] + u[nd - 2]) / (2.0 * ht);
                else
                    ut = (u[nd + 1] - u[nd - 1]) / (2.0 * ht);
                const Vec T = g.metric(c, k);
                double* out_row = out.data.data() + (static_cast<std::size_t>(j) * nodes + nd) * n;
                for (int b = 0; b < d; ++b) {
                    double ux;
                    if (idx[b] == 0) {
                        const int c1 = g.neighbor(c, b, 1), c2 = g.neighbor(c1, b, 1);
                        ux = (-3.0 * u[nd] + 4.0 * u[g.node(c1, k)] - u[g.node(c2, k)]) / (2.0 * h);
                    } else if (idx[b] == nx - 1) {
                        const int c1 = g.neighbor(c, b, -1), c2 = g.neighbor(c1, b, -1);
                        ux = (3.0 * u[nd] - 4.0 * u[g.node(c1, k)] + u[g.node(c2, k)]) / (2.0 * h);
                    } else {
                        ux = (u[g.node(g.neighbor(c, b, 1), k)] - u[g.node(g.neighbor(c, b, -1), k)]) / (2.0 * h);
                    }
                    out_row[b] = ux + T[b] * ut;
                }
                out_row[d] = ut / delta;
            }
        }
    }
    return out;
}

GradientField gradient(const SolutionField& solution)
{
    return gradient(solution.grid, solution.components, solution.values);
}

std::vector<double> nodal_utilde(const MappedGrid& grid, const BoundaryData& data)
{
    const int N = data.components();
    std::vector<double> out(static_cast<std::size_t>(N) * grid.nodes());
    for (int l = 0; l < N; ++l) {
        for (int c = 0; c < grid.columns(); ++c) {
            const Vec& x = grid.column_point(c);
            const double gp = data.g_plus(l).value(x);
            const double gm = data.g_minus(l).value(x);
            for (int k = 0; k < grid.nt(); ++k)
                out[static_cast<std::size_t>(l) * grid.nodes() + grid.node(c, k)] = gm + (gp - gm) * grid.t(k);
        }
    }
    return out;
}

std::vector<double> tangential_weights(const MappedGrid& grid, const Vec& center, double radius, double clip)
{
    const int d = grid.tangential_dim();
    const double h = grid.h();
    const double r = grid.region().r_solve();
    std::vector<double> w(grid.columns(), 0.0);
    if (d == 1) {
        const double lo = std::max({center[0] - radius, -clip, -r});
        const double hi = std::min({center[0] + radius, clip, r});
        if (!(lo < hi)) return w;
        for (int i = 0; i + 1 < grid.nx(); ++i) {
            const double xi = grid.column_point(i)[0];
            const double xj = grid.column_point(i + 1)[0];
            const double a = std::max(lo, xi);
            const double b = std::min(hi, xj);
            if (!(a < b)) continue;
            w[i] += ((xj - a) * (xj - a) - (xj - b) * (xj - b)) / (2.0 * h);
            w[i + 1] += ((b - xi) * (b - xi) - (a - xi) * (a - xi)) / (2.0 * h);
        }
        return w;
    }
    const double tol = 1e-12;
    for (int c = 0; c < grid.columns(); ++c) {
        const Vec& x = grid.column_point(c);
        const double dx = x[0] - center[0], dy = x[1] - center[1];
        if (std::sqrt(dx * dx + dy * dy) > radius + tol || norm(x, 2) > clip + tol) continue;
        const auto idx = grid.column_indices(c);
        double f = h * h;
        for (int a = 0; a < 2; ++a)
            if (idx[a] == 0 || idx[a] == grid.nx() - 1) f *= 0.5;
        w[c] = f;
    }
    return w;
}

double integrate(const MappedGrid& grid, const std::vector<double>& column_weights, const std::vector<double>& q)
{
    const int nt = grid.nt();
    const double ht = grid.ht();
    double total = 0.0;
    for (int c = 0; c < grid.columns(); ++c) {
        if (column_weights[c] == 0.0) continue;
        double col = 0.0;
        for (int k = 0; k < nt; ++k) col += (k == 0 || k == nt - 1 ? 0.5 : 1.0) * q[grid.node(c, k)];
        total += column_weights[c] * grid.delta(c) * col * ht;
    }
    return total;
}

double l2_norm(const MappedGrid& grid, int components, const std::vector<double>& values)
{
    const double r = grid.region().r_solve();
    const auto w = tangential_weights(grid, Vec{}, r, r);
    std::vector<double> q(grid.nodes(), 0.0);
    for (int j = 0; j < components; ++j)
        for (int nd = 0; nd < grid.nodes(); ++nd) {
            const double v = values[static_cast<std::size_t>(j) * grid.nodes() + nd];
            q[nd] += v * v;
        }
    return std::sqrt(integrate(grid, w, q));
}

namespace {

std::vector<double> squared_norms(const GradientField& g)
{
    std::vector<double> q(g.grid->nodes());
    for (int nd = 0; nd < g.grid->nodes(); ++nd) {
        const double v = g.norm(nd);
        q[nd] = v * v;
    }
    return q;
}

} // namespace

double energy(const GradientField& grad_w, const Vec& center, double radius)
{
    const MappedGrid& g = *grad_w.grid;
    const auto w = tangential_weights(g, center, radius, g.region().r_analyze());
    return integrate(g, w, squared_norms(grad_w));
}

double energy_half(const GradientField& grad_w)
{
    const double ra = grad_w.grid->region().r_analyze();
    return energy(grad_w, Vec{}, ra);
}

std::vector<std::pair<double, double>> local_energy_profile(const GradientField& grad_w, const Vec& x0_prime,
                                                           const std::vector<double>& radii)
{
    const MappedGrid& g = *grad_w.grid;
    const auto q = squared_norms(grad_w);
    std::vector<std::pair<double, double>> out;
    for (double s : radii) {
        window(g.region(), x0_prime, s); // throws when the window leaves the grid
        out.emplace_back(s, integrate(g, tangential_weights(g, x0_prime, s, g.region().r_analyze()), q));
    }
    return out;
}

double sup_bound_constant(const GradientField& grad_u, const BoundaryData& data, double u_l2, double R0)
{
    const MappedGrid& g = *grad_u.grid;
    const int d = g.tangential_dim();
    const double eps = g.region().epsilon();
    const double budget = data.c2_norm_plus() + data.c2_norm_minus() + u_l2;
    double best = 0.0;
    for (int c = 0; c < g.columns(); ++c) {
        const Vec& x = g.column_point(c);
        const double r = norm(x, d);
        if (r > R0 + 1e-12) continue;
        const double den = data.mismatch(x) / (eps + r * r) + budget;
        for (int k = 0; k < g.nt(); ++k) {
            const double gu = grad_u.norm(g.node(c, k));
            if (gu == 0.0) continue;
            best = std::max(best, den > 0.0 ? gu / den : std::numeric_limits<double>::infinity());
        }
    }
    return best;
}

std::optional<double> centerline_lower_constant(const GradientField& grad_u, const BoundaryData& data)
{
    const MappedGrid& g = *grad_u.grid;
    const Vec origin{};
    double mmax = 0.0;
    for (int l = 0; l < data.components(); ++l) mmax = std::max(mmax, std::abs(data.mismatch(l, origin)));
    if (mmax < 1e-14) return std::nullopt;
    const int c0 = g.center_column();
    const double eps = g.region().epsilon();
    double best = std::numeric_limits<double>::infinity();
    for (int k = 1; k < g.nt() - 1; ++k) best = std::min(best, grad_u.norm(g.node(c0, k)) * eps / mmax);
    return best;
}

PointwiseFactors pointwise_w_check(const GradientField& grad_w, const BoundaryData& data, double w_l2, double R0)
{
    const MappedGrid& g = *grad_w.grid;
    const int d = g.tangential_dim();
    const double se = std::sqrt(g.region().epsilon());
    const double budget = data.c2_norm_plus() + data.c2_norm_minus() + w_l2;
    PointwiseFactors out;
    for (int c = 0; c < g.columns(); ++c) {
        const Vec& x = g.column_point(c);
        const double r = norm(x, d);
        const bool inner = r <= se + 1e-12;
        if (!inner && r >= R0 - 1e-12) continue;
        const double den = data.mismatch(x) / (inner ? se : r) + budget;
        double m = 0.0;
        for (int k = 0; k < g.nt(); ++k) m = std::max(m, grad_w.norm(g.node(c, k)));
        const double v = den > 0.0 ? m / den : 0.0;
        auto& slot = inner ? out.m_inner : out.m_outer;
        slot = std::max(slot.value_or(0.0), v);
    }
    return out;
}

BoundReport analyze(const SolutionField& u, const BoundaryData& data, const AnalysisOptions& options)
{
    const MappedGrid& g = *u.grid;
    const NarrowRegion& region = g.region();
    const int n = g.n();
    const int d = n - 1;
    const double eps = region.epsilon();

    BoundReport rep;
    rep.epsilon = eps;
    rep.nx = g.nx();
    rep.nt = g.nt();
    rep.R0 = options.R0;
    rep.scenario = options.scenario;

    const GradientField gu = gradient(u);
    rep.u_l2 = l2_norm(g, u.components, u.values);

    std::vector<double> w = nodal_utilde(g, data);
    for (std::size_t q = 0; q < w.size(); ++q) w[q] = u.values[q] - w[q];
    const GradientField gw = gradient(u.grid, u.components, w);
    rep.w_l2 = l2_norm(g, u.components, w);

    rep.center_grad = gu.norm(g.node(g.center_column(), (g.nt() - 1) / 2));
    const double sup_radius = options.sup_region == SupRegion::inner ? options.R0 : eps;
    for (int c = 0; c < g.columns(); ++c) {
        if (norm(g.column_point(c), d) > sup_radius + 1e-12) continue;
        const auto idx = g.column_indices(c);
        const bool even_column = idx[0] % 2 == 0 && idx[1] % 2 == 0;
        for (int k = 0; k < g.nt(); ++k) {
            const double v = gu.norm(g.node(c, k));
            rep.sup_grad = std::max(rep.sup_grad, v);
            if (even_column && k % 2 == 0) rep.sup_grad_shared = std::max(rep.sup_grad_shared, v);
        }
    }
    rep.C_emp = sup_bound_constant(gu, data, rep.u_l2, options.R0);
    rep.c_low = centerline_lower_constant(gu, data);

    for (int c = 0; c < g.columns(); ++c) {
        const Vec& x = g.column_point(c);
        const double r = norm(x, d);
        const double m = data.mismatch(x);
        if (r > options.R0 + 1e-12 || m < 1e-14) continue;
        const double v = (eps + r * r) * gu.normal_norm(g.node(c, (g.nt() - 1) / 2)) / m;
        rep.normal_profile = std::max(rep.normal_profile.value_or(0.0), v);
    }

    const double gp2 = data.c2_norm_plus() * data.c2_norm_plus();
    const double gm2 = data.c2_norm_minus() * data.c2_norm_minus();
    const double w2 = rep.w_l2 * rep.w_l2;
    const double norms2 = gp2 + gm2 + w2;

    rep.energy_half = energy_half(gw);
    const Vec origin{};
    rep.F_delta0 = energy(gw, origin, region.gap_width(origin));
    rep.lemma.k213 = norms2 > 0.0 ? rep.energy_half / norms2 : 0.0;
    const double m0 = data.mismatch(origin);
    const double den219 = std::pow(eps, d) * (m0 * m0 + eps * norms2);
    rep.lemma.k219 = den219 > 0.0 ? rep.F_delta0 / den219 : 0.0;

    Vec x0{};
    x0[0] = 2.0 * std::sqrt(eps);
    rep.x0_norm = x0[0];
    const double delta_x0 = x0[0] < region.r_solve() ? region.gap_width(x0) : 0.0;
    if (x0[0] < region.r_analyze() && x0[0] + delta_x0 <= region.r_solve()) {
        rep.F_x0 = energy(gw, x0, delta_x0);
        const double mx = data.mismatch(x0);
        const double den = std::pow(x0[0], 2 * d) * (mx * mx + x0[0] * x0[0] * norms2);
        rep.lemma.k220 = den > 0.0 ? *rep.F_x0 / den : 0.0;
    }

    const PointwiseFactors pf = pointwise_w_check(gw, data, rep.w_l2, options.R0);
    rep.lemma.k225 = pf.m_inner;
    rep.lemma.k226 = pf.m_outer;
    return rep;
}

double superposition_check(const EllipticOperator& op, std::shared_ptr<const MappedGrid> grid,
                           const BoundaryData& data, const SolveOptions& options)
{
    const SolutionField full = solve(op, grid, data, options);
    std::vector<double> sum(full.values.size(), 0.0);
    for (int l = 0; l < data.components(); ++l) {
        const SolutionField v = solve_component(op, grid, data, l, options);
        for (std::size_t q = 0; q < sum.size(); ++q) sum[q] += v.values[q];
    }
    double diff = 0.0;
    for (std::size_t q = 0; q < sum.size(); ++q) diff = std::max(diff, std::abs(full.values[q] - sum[q]));
    return diff;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points)
{
    if (points.size() < 3) throw DomainError("rate fit: need at least 3 points");
    for (std::size_t q = 0; q < points.size(); ++q) {
        if (!(points[q].first > 0.0) || !(points[q].second > 0.0))
            throw DomainError("rate fit: epsilons and metric values must be positive");
        if (q > 0 && !(points[q].first < points[q - 1].first))
            throw DomainError("rate fit: epsilons must be strictly decreasing");
    }
    const double m = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& [e, v] : points) {
        sx += std::log(e);
        sy += std::log(v);
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [e, v] : points) {
        const double dx = std::log(e) - mx, dy = std::log(v) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    RateFit fit;
    fit.points = points;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (const auto& [e, v] : points) {
        const double r = std::log(v) - (fit.intercept + fit.slope * std::log(e));
        ss_res += r * r;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    fit.conclusive = fit.r2 >= 0.98;
    return fit;
}

std::optional<double> spread(const std::vector<std::optional<double>>& values)
{
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    int count = 0;
    for (const auto& v : values) {
        if (!v || !(*v > 0.0)) continue;
        lo = std::min(lo, *v);
        hi = std::max(hi, *v);
        ++count;
    }
    if (count < 2) return std::nullopt;
    return hi / lo;
}

} // namespace narrowgap
