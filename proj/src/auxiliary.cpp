#include "narrowgap/auxiliary.hpp"

#include <algorithm>
#include <limits>

namespace narrowgap {

BoundaryData::BoundaryData(std::vector<Polynomial> g_plus, std::vector<Polynomial> g_minus, int samples_per_dim)
    : g_plus_(std::move(g_plus)), g_minus_(std::move(g_minus)), samples_(samples_per_dim)
{
    if (g_plus_.empty() || g_plus_.size() != g_minus_.size())
        throw DomainError("boundary data: need matching, non-empty top and bottom traces");
    const int d = g_plus_.front().n_vars();
    for (const auto* side : {&g_plus_, &g_minus_})
        for (const auto& p : *side)
            if (p.n_vars() != d) throw DomainError("boundary data: traces must share the tangential variables");
    if (samples_ <= 0) samples_ = d == 1 ? 1281 : 161;
    compute_norms();
}

BoundaryData BoundaryData::constant(int tangential_dim, const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size()) throw DomainError("boundary data: component count mismatch");
    std::vector<Polynomial> gp, gm;
    for (std::size_t l = 0; l < a.size(); ++l) {
        gp.push_back(Polynomial::constant(tangential_dim, a[l]));
        gm.push_back(Polynomial::constant(tangential_dim, b[l]));
    }
    return BoundaryData(std::move(gp), std::move(gm));
}

void BoundaryData::compute_norms()
{
    const int d = tangential_dim();
    const int N = components();
    grad_plus_.assign(N, 0.0);
    grad_minus_.assign(N, 0.0);
    hess_plus_.assign(N, 0.0);
    hess_minus_.assign(N, 0.0);
    double v_p = 0, g_p = 0, h_p = 0, v_m = 0, g_m = 0, h_m = 0;
    for (const Vec& x : sample_ball(d, 1.0, samples_)) {
        double vp = 0, gp = 0, hp = 0, vm = 0, gm = 0, hm = 0;
        for (int l = 0; l < N; ++l) {
            const Jet jp = g_plus_[l].jet(x, 2);
            const Jet jm = g_minus_[l].jet(x, 2);
            const double gpl = norm(jp.grad, d), gml = norm(jm.grad, d);
            const double hpl = frobenius(jp.hess, d), hml = frobenius(jm.hess, d);
            grad_plus_[l] = std::max(grad_plus_[l], gpl);
            grad_minus_[l] = std::max(grad_minus_[l], gml);
            hess_plus_[l] = std::max(hess_plus_[l], hpl);
            hess_minus_[l] = std::max(hess_minus_[l], hml);
            vp += jp.value * jp.value;
            vm += jm.value * jm.value;
            gp += gpl * gpl;
            gm += gml * gml;
            hp += hpl * hpl;
            hm += hml * hml;
        }
        v_p = std::max(v_p, std::sqrt(vp));
        g_p = std::max(g_p, std::sqrt(gp));
        h_p = std::max(h_p, std::sqrt(hp));
        v_m = std::max(v_m, std::sqrt(vm));
        g_m = std::max(g_m, std::sqrt(gm));
        h_m = std::max(h_m, std::sqrt(hm));
    }
    c1_plus_ = v_p + g_p;
    c1_minus_ = v_m + g_m;
    c2_plus_ = c1_plus_ + h_p;
    c2_minus_ = c1_minus_ + h_m;
}

double BoundaryData::grad_sup(int l, bool plus) const
{
    return plus ? grad_plus_.at(l) : grad_minus_.at(l);
}

double BoundaryData::hess_sup(int l, bool plus) const
{
    return plus ? hess_plus_.at(l) : hess_minus_.at(l);
}

double BoundaryData::mismatch(const Vec& x_prime) const
{
    double s = 0.0;
    for (int l = 0; l < components(); ++l) {
        const double m = mismatch(l, x_prime);
        s += m * m;
    }
    return std::sqrt(s);
}

double BoundaryData::mismatch(int l, const Vec& x_prime) const
{
    return g_plus_.at(l).value(x_prime) - g_minus_.at(l).value(x_prime);
}

BoundaryData BoundaryData::component_only(int l) const
{
    if (l < 0 || l >= components()) throw DomainError("boundary data: component out of range");
    const int d = tangential_dim();
    std::vector<Polynomial> gp(components(), Polynomial(d)), gm(components(), Polynomial(d));
    gp[l] = g_plus_[l];
    gm[l] = g_minus_[l];
    return BoundaryData(std::move(gp), std::move(gm), samples_);
}

BoundaryData BoundaryData::scaled(double s) const
{
    std::vector<Polynomial> gp = g_plus_, gm = g_minus_;
    for (auto& p : gp) p *= s;
    for (auto& p : gm) p *= s;
    return BoundaryData(std::move(gp), std::move(gm), samples_);
}

Jet ubar(const NarrowRegion& region, const Vec& x, int order)
{
    const int n = region.n();
    const int d = n - 1;
    const GapProfile& prof = region.profile();
    const Jet h1 = prof.h1.jet(x, order);
    const Jet h2 = prof.h2.jet(x, order);
    const double delta = region.epsilon() + h1.value - h2.value;
    if (!(delta > 0.0)) throw DomainError("ubar: non-positive gap width");
    const double xn = x[n - 1];
    Jet u;
    u.value = (xn - h2.value + 0.5 * region.epsilon()) / delta;
    if (order < 1) return u;

    Vec ddelta{};
    for (int a = 0; a < d; ++a) {
        ddelta[a] = h1.grad[a] - h2.grad[a];
        u.grad[a] = (-h2.grad[a] - u.value * ddelta[a]) / delta;
    }
    u.grad[n - 1] = 1.0 / delta;
    if (order < 2) return u;

    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            const double hd = h1.hess[a][b] - h2.hess[a][b];
            u.hess[a][b] = (-h2.hess[a][b] - u.grad[b] * ddelta[a] - u.value * hd) / delta - u.grad[a] * ddelta[b] / delta;
        }
        u.hess[a][n - 1] = -ddelta[a] / (delta * delta);
        u.hess[n - 1][a] = u.hess[a][n - 1];
    }
    u.hess[n - 1][n - 1] = 0.0;
    return u;
}

namespace {

// g- + (g+ - g-) * ubar with the product rule; g depends on x' only.
Jet interpolate(const Jet& gp, const Jet& gm, const Jet& ub, int n, int order)
{
    const int d = n - 1;
    Jet m;
    m.value = gp.value - gm.value;
    for (int a = 0; a < d; ++a) {
        m.grad[a] = gp.grad[a] - gm.grad[a];
        for (int b = 0; b < d; ++b) m.hess[a][b] = gp.hess[a][b] - gm.hess[a][b];
    }
    Jet u;
    u.value = gm.value + m.value * ub.value;
    if (order < 1) return u;
    for (int a = 0; a < n; ++a) {
        const double dga = a < d ? gm.grad[a] : 0.0;
        const double dma = a < d ? m.grad[a] : 0.0;
        u.grad[a] = dga + dma * ub.value + m.value * ub.grad[a];
    }
    if (order < 2) return u;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const double hg = (a < d && b < d) ? gm.hess[a][b] : 0.0;
            const double hm = (a < d && b < d) ? m.hess[a][b] : 0.0;
            const double ma = a < d ? m.grad[a] : 0.0;
            const double mb = b < d ? m.grad[b] : 0.0;
            u.hess[a][b] = hg + hm * ub.value + ma * ub.grad[b] + mb * ub.grad[a] + m.value * ub.hess[a][b];
        }
    return u;
}

} // namespace

std::vector<Jet> utilde(const NarrowRegion& region, const BoundaryData& data, int l, const Vec& x, int order)
{
    if (l < 0 || l >= data.components()) throw DomainError("utilde: component out of range");
    std::vector<Jet> out(data.components());
    const Jet ub = ubar(region, x, order);
    out[l] = interpolate(data.g_plus(l).jet(x, order), data.g_minus(l).jet(x, order), ub, region.n(), order);
    return out;
}

std::vector<Jet> utilde_full(const NarrowRegion& region, const BoundaryData& data, const Vec& x, int order)
{
    std::vector<Jet> out(data.components());
    const Jet ub = ubar(region, x, order);
    for (int l = 0; l < data.components(); ++l)
        out[l] = interpolate(data.g_plus(l).jet(x, order), data.g_minus(l).jet(x, order), ub, region.n(), order);
    return out;
}

std::vector<double> ftilde(const EllipticOperator& op, const NarrowRegion& region, const BoundaryData& data,
                           const Vec& x)
{
    if (op.N() != data.components()) throw DomainError("ftilde: operator and data component counts differ");
    const auto u = utilde_full(region, data, x, 2);
    auto f = apply_operator(op, x, u);
    for (double& v : f) v = -v;
    return f;
}

double BoundShapeReport::get(const std::string& name) const
{
    for (const auto& [k, v] : constants)
        if (k == name) return v;
    throw std::out_of_range("bound shape report: no constant named " + name);
}

BoundShapeReport check_derivative_bounds(const NarrowRegion& region, const BoundaryData& data, int samples)
{
    const int n = region.n();
    const int d = n - 1;
    const double eps = region.epsilon();
    const int nt = samples / 2 + 1;

    double ub_tan = 0, ub_up = 0, ub_lo = 0, ub_hess = 0, ub_mix = 0, ub_nn = 0;
    double ut_tan = 0, ut_up = 0, ut_lo = 0, ut_hess = 0, ut_mix = 0, ut_nn = 0;

    for (const Vec& xp : sample_ball(d, region.r_solve(), samples)) {
        const double r = norm(xp, d);
        const double s = eps + r * r;
        const double lo = region.bottom(xp);
        const double delta = region.gap_width(xp);
        for (int k = 0; k < nt; ++k) {
            Vec x = xp;
            x[n - 1] = lo + delta * k / (nt - 1);
            const Jet ub = ubar(region, x, 2);
            Vec tan_grad{};
            Mat tan_hess{};
            Vec mixed{};
            for (int a = 0; a < d; ++a) {
                tan_grad[a] = ub.grad[a];
                mixed[a] = ub.hess[a][n - 1];
                for (int b = 0; b < d; ++b) tan_hess[a][b] = ub.hess[a][b];
            }
            const double dn = std::abs(ub.grad[n - 1]);
            if (r > 0) ub_tan = std::max(ub_tan, norm(tan_grad, d) * s / r);
            ub_up = std::max(ub_up, dn * s);
            ub_lo = std::max(ub_lo, 1.0 / (dn * s));
            ub_hess = std::max(ub_hess, frobenius(tan_hess, d) * s);
            if (r > 0) ub_mix = std::max(ub_mix, norm(mixed, d) * s * s / r);
            ub_nn = std::max(ub_nn, std::abs(ub.hess[n - 1][n - 1]));

            for (int l = 0; l < data.components(); ++l) {
                const double m = std::abs(data.mismatch(l, xp));
                const double G = data.grad_sup(l, true) + data.grad_sup(l, false);
                const double H = data.hess_sup(l, true) + data.hess_sup(l, false);
                const Jet u = utilde(region, data, l, x, 2)[l];
                Vec ug{}, um{};
                Mat uh{};
                for (int a = 0; a < d; ++a) {
                    ug[a] = u.grad[a];
                    um[a] = u.hess[a][n - 1];
                    for (int b = 0; b < d; ++b) uh[a][b] = u.hess[a][b];
                }
                const double und = std::abs(u.grad[n - 1]);
                auto ratio = [](double lhs, double rhs) { return rhs > 0.0 ? lhs / rhs : 0.0; };
                ut_tan = std::max(ut_tan, ratio(norm(ug, d), r * m / s + G));
                if (m > 0.0) {
                    ut_up = std::max(ut_up, und * s / m);
                    ut_lo = std::max(ut_lo, und > 0.0 ? m / (s * und) : std::numeric_limits<double>::infinity());
                }
                ut_hess = std::max(ut_hess, ratio(frobenius(uh, d), m / s + (r / s + 1.0) * G + H));
                ut_mix = std::max(ut_mix, ratio(norm(um, d), r * m / (s * s) + G / s));
                ut_nn = std::max(ut_nn, std::abs(u.hess[n - 1][n - 1]));
            }
        }
    }
    BoundShapeReport rep;
    rep.epsilon = eps;
    rep.constants = {{"ubar_tangential_grad", ub_tan},   {"ubar_normal_upper", ub_up},
                     {"ubar_normal_lower", ub_lo},      {"ubar_tangential_hess", ub_hess},
                     {"ubar_mixed", ub_mix},            {"ubar_normal_normal", ub_nn},
                     {"utilde_tangential_grad", ut_tan}, {"utilde_normal_upper", ut_up},
                     {"utilde_normal_lower", ut_lo},    {"utilde_tangential_hess", ut_hess},
                     {"utilde_mixed", ut_mix},          {"utilde_normal_normal", ut_nn}};
    return rep;
}

} // namespace narrowgap
