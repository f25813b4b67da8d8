#ifndef NARROWGAP_TESTS_FD_ORACLE_HPP
#define NARROWGAP_TESTS_FD_ORACLE_HPP

#include <functional>
#include <vector>

#include "narrowgap/operators.hpp"

namespace narrowgap::testing {

using Field = std::function<std::vector<double>(const Vec&)>;

/// Central difference of f along axis a with step h; 2nd or 4th order.
template <class F>
auto central(const F& f, const Vec& x, int a, double h, int order)
{
    auto at = [&](double s) {
        Vec y = x;
        y[a] += s * h;
        return f(y);
    };
    auto p1 = at(1), m1 = at(-1);
    if (order == 2) {
        for (std::size_t q = 0; q < p1.size(); ++q) p1[q] = (p1[q] - m1[q]) / (2 * h);
        return p1;
    }
    auto p2 = at(2), m2 = at(-2);
    for (std::size_t q = 0; q < p1.size(); ++q) p1[q] = (8 * (p1[q] - m1[q]) - (p2[q] - m2[q])) / (12 * h);
    return p1;
}

/// The operator applied to a field known only by its values: the flux
/// A grad u + B u is differenced with nested central differences, so no
/// code is shared with the exact operator application.
inline std::vector<double> fd_apply(const EllipticOperator& op, const Field& u, const Vec& x, double h, int order)
{
    const int n = op.n();
    const int N = op.N();
    auto grad = [&](const Vec& y) {
        std::vector<std::vector<double>> g(n);
        for (int b = 0; b < n; ++b) g[b] = central(u, y, b, h, order);
        return g;
    };
    std::vector<double> out(N, 0.0);
    for (int a = 0; a < n; ++a) {
        auto flux = [&](const Vec& y) {
            const auto g = grad(y);
            const auto v = u(y);
            std::vector<double> f(N, 0.0);
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < N; ++j) {
                    for (int b = 0; b < n; ++b) f[i] += op.A(i, j, a, b).value(y) * g[b][j];
                    f[i] += op.B(i, j, a).value(y) * v[j];
                }
            return f;
        };
        const auto df = central(flux, x, a, h, order);
        for (int i = 0; i < N; ++i) out[i] += df[i];
    }
    const auto g = grad(x);
    const auto v = u(x);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            for (int b = 0; b < n; ++b) out[i] += op.C(i, j, b).value(x) * g[b][j];
            out[i] += op.D(i, j).value(x) * v[j];
        }
    return out;
}

} // namespace narrowgap::testing

#endif
