#include "narrowgap/verification.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>

#include "narrowgap/analysis.hpp"
#include "narrowgap/auxiliary.hpp"
#include "narrowgap/expression.hpp"

namespace narrowgap {

std::vector<double> flat_gap_exact(double epsilon, const std::vector<double>& a, const std::vector<double>& b,
                                   const Vec& x, int n)
{
    const double s = (x[n - 1] + 0.5 * epsilon) / epsilon;
    std::vector<double> out(a.size());
    for (std::size_t l = 0; l < a.size(); ++l) out[l] = b[l] + (a[l] - b[l]) * s;
    return out;
}

namespace {

class ManufacturedParser {
public:
    ManufacturedParser(std::string_view text, int d) : text_(text), d_(d) {}

    ManufacturedComponent parse()
    {
        ManufacturedComponent out;
        skip();
        if (at_end()) throw ParseError(pos_, "empty expression");
        double sign = 1.0;
        if (peek() == '+' || peek() == '-') {
            sign = peek() == '-' ? -1.0 : 1.0;
            ++pos_;
        }
        out.push_back(term(sign));
        while (!at_end()) {
            const char c = peek();
            if (c != '+' && c != '-') throw ParseError(pos_, std::string("unexpected character '") + c + "'");
            ++pos_;
            out.push_back(term(c == '-' ? -1.0 : 1.0));
        }
        return out;
    }

private:
    bool at_end()
    {
        skip();
        return pos_ >= text_.size();
    }
    void skip()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    char peek()
    {
        skip();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    ManufacturedTerm term(double sign)
    {
        ManufacturedTerm t;
        t.coeff = sign;
        factor(t);
        while (peek() == '*') {
            ++pos_;
            factor(t);
        }
        return t;
    }

    int power()
    {
        if (peek() != '^') return 1;
        ++pos_;
        skip();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        int k = 0;
        if (pos_ == start || std::from_chars(text_.data() + start, text_.data() + pos_, k).ec != std::errc{})
            throw ParseError(start, "exponent must be a non-negative integer");
        if (pos_ < text_.size() && text_[pos_] == '.') throw ParseError(start, "exponent must be a non-negative integer");
        return k;
    }

    void factor(ManufacturedTerm& t)
    {
        const char c = peek();
        const std::size_t start = pos_;
        if (c == '\0') throw ParseError(pos_, "unexpected end of expression");
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t end = pos_;
            while (end < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.'))
                ++end;
            if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
                std::size_t e = end + 1;
                if (e < text_.size() && (text_[e] == '+' || text_[e] == '-')) ++e;
                if (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) {
                    while (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) ++e;
                    end = e;
                }
            }
            double v = 0.0;
            if (std::from_chars(text_.data() + pos_, text_.data() + end, v).ec != std::errc{})
                throw ParseError(pos_, "malformed number");
            pos_ = end;
            t.coeff *= v;
            return;
        }
        if (c == 'x') {
            ++pos_;
            std::size_t end = pos_;
            while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
            int index = 0;
            if (end == pos_ || std::from_chars(text_.data() + pos_, text_.data() + end, index).ec != std::errc{} ||
                index < 1 || index > d_)
                throw ParseError(start, "unknown variable");
            pos_ = end;
            t.xexp[index - 1] += power();
            return;
        }
        if (text_.substr(pos_, 3) == "sin" || text_.substr(pos_, 3) == "cos") {
            const bool cosine = text_[pos_] == 'c';
            pos_ += 3;
            trig(t, cosine, start);
            return;
        }
        if (c == 't') {
            ++pos_;
            t.tpow += power();
            return;
        }
        throw ParseError(pos_, std::string("unexpected character '") + c + "'");
    }

    void trig(ManufacturedTerm& t, bool cosine, std::size_t start)
    {
        if (peek() != '(') throw ParseError(pos_, "expected '('");
        const std::size_t open = ++pos_;
        int depth = 1;
        while (pos_ < text_.size() && depth > 0) {
            if (text_[pos_] == '(') ++depth;
            if (text_[pos_] == ')') --depth;
            ++pos_;
        }
        if (depth != 0) throw ParseError(open, "expected ')'");
        std::string arg(text_.substr(open, pos_ - 1 - open));
        const bool in_t = arg.find('t') != std::string::npos;
        Trig tr;
        tr.cosine = cosine;
        Polynomial p;
        try {
            if (in_t) {
                if (arg.find('x') != std::string::npos) throw ParseError(0, "mixed trigonometric argument");
                std::string fixed;
                for (char ch : arg) fixed += ch == 't' ? std::string("x1") : std::string(1, ch);
                p = parse_expression(fixed, 1);
            } else {
                p = parse_expression(arg, d_);
            }
        } catch (const ParseError& e) {
            throw ParseError(open + e.position(), std::string("in trigonometric argument: ") + e.what());
        }
        if (p.degree() > 1) throw ParseError(start, "unsupported u* form: trigonometric argument must be linear");
        const int nv = in_t ? 1 : d_;
        for (int k = 0; k < nv; ++k) {
            Exponent e{};
            e[k] = 1;
            tr.freq[k] = p.coefficient(e);
        }
        tr.phase = p.coefficient(Exponent{});
        auto& slot = in_t ? t.ttrig : t.xtrig;
        if (slot) throw ParseError(start, "unsupported u* form: more than one trigonometric factor of a kind");
        slot = tr;
    }

    std::string_view text_;
    int d_;
    std::size_t pos_ = 0;
};

/// Jet (in x') of sin/cos(freq . x' + phase).
Jet trig_jet(const Trig& tr, const Vec& xp, int d)
{
    double th = tr.phase;
    for (int a = 0; a < d; ++a) th += tr.freq[a] * xp[a];
    const double s = std::sin(th), c = std::cos(th);
    const double v = tr.cosine ? c : s;
    const double dv = tr.cosine ? -s : c;
    Jet j;
    j.value = v;
    for (int a = 0; a < d; ++a) {
        j.grad[a] = dv * tr.freq[a];
        for (int b = 0; b < d; ++b) j.hess[a][b] = -v * tr.freq[a] * tr.freq[b];
    }
    return j;
}

Jet product(const Jet& p, const Jet& q, int d)
{
    Jet r;
    r.value = p.value * q.value;
    for (int a = 0; a < d; ++a) {
        r.grad[a] = p.value * q.grad[a] + q.value * p.grad[a];
        for (int b = 0; b < d; ++b)
            r.hess[a][b] = p.value * q.hess[a][b] + p.grad[a] * q.grad[b] + q.grad[a] * p.grad[b] +
                           q.value * p.hess[a][b];
    }
    return r;
}

/// Value and first two derivatives of t^p * trig(omega t + phi).
std::array<double, 3> vertical_factor(const ManufacturedTerm& term, double t)
{
    const int p = term.tpow;
    const double f0 = std::pow(t, p);
    const double f1 = p >= 1 ? p * std::pow(t, p - 1) : 0.0;
    const double f2 = p >= 2 ? p * (p - 1) * std::pow(t, p - 2) : 0.0;
    if (!term.ttrig) return {f0, f1, f2};
    const Trig& tr = *term.ttrig;
    const double w = tr.freq[0];
    const double th = w * t + tr.phase;
    const double s = std::sin(th), c = std::cos(th);
    const double g0 = tr.cosine ? c : s;
    const double g1 = (tr.cosine ? -s : c) * w;
    const double g2 = -g0 * w * w;
    return {f0 * g0, f1 * g0 + f0 * g1, f2 * g0 + 2.0 * f1 * g1 + f0 * g2};
}

} // namespace

ManufacturedComponent parse_manufactured(std::string_view text, int tangential_dim)
{
    return ManufacturedParser(text, tangential_dim).parse();
}

ManufacturedProblem::ManufacturedProblem(EllipticOperator op, NarrowRegion region,
                                         std::vector<ManufacturedComponent> u_star)
    : op_(std::move(op)), region_(std::move(region)), u_star_(std::move(u_star))
{
    if (static_cast<int>(u_star_.size()) != op_.N())
        throw DomainError("manufactured problem: need one field per operator component");
    if (op_.n() != region_.n()) throw DomainError("manufactured problem: operator and region dimensions differ");
}

std::vector<Jet> ManufacturedProblem::jets(const Vec& x) const
{
    const int n = region_.n();
    const int d = n - 1;
    const Jet ub = ubar(region_, x, 2);
    std::vector<Jet> out(u_star_.size());
    for (std::size_t l = 0; l < u_star_.size(); ++l) {
        Jet& u = out[l];
        for (const ManufacturedTerm& term : u_star_[l]) {
            Jet X = Polynomial::monomial(d, term.xexp, term.coeff).jet(x, 2);
            if (term.xtrig) X = product(X, trig_jet(*term.xtrig, x, d), d);
            const auto T = vertical_factor(term, ub.value);
            // Chain rule through t = ubar(x); X has no x_n dependence.
            u.value += X.value * T[0];
            for (int a = 0; a < n; ++a) {
                const double xa = a < d ? X.grad[a] : 0.0;
                u.grad[a] += xa * T[0] + X.value * T[1] * ub.grad[a];
                for (int b = 0; b < n; ++b) {
                    const double xb = b < d ? X.grad[b] : 0.0;
                    const double xab = a < d && b < d ? X.hess[a][b] : 0.0;
                    u.hess[a][b] += xab * T[0] + (xa * ub.grad[b] + xb * ub.grad[a]) * T[1] +
                                    X.value * (T[2] * ub.grad[a] * ub.grad[b] + T[1] * ub.hess[a][b]);
                }
            }
        }
    }
    return out;
}

std::vector<double> ManufacturedProblem::values(const Vec& x) const
{
    const auto js = jets(x);
    std::vector<double> out(js.size());
    for (std::size_t l = 0; l < js.size(); ++l) out[l] = js[l].value;
    return out;
}

std::vector<double> ManufacturedProblem::source(const Vec& x) const
{
    return apply_operator(op_, x, jets(x));
}

BoundaryValues ManufacturedProblem::boundary() const
{
    return [this](const Vec& x, double, std::span<double> out) {
        const auto v = values(x);
        std::copy(v.begin(), v.end(), out.begin());
    };
}

NodalSource ManufacturedProblem::source_function() const
{
    return [this](const Vec& x, std::span<double> out) {
        const auto f = source(x);
        std::copy(f.begin(), f.end(), out.begin());
    };
}

ManufacturedProblem manufactured_problem(const EllipticOperator& op, const NarrowRegion& region,
                                         const std::vector<std::string>& u_star)
{
    std::vector<ManufacturedComponent> comps;
    for (const auto& s : u_star) comps.push_back(parse_manufactured(s, region.tangential_dim()));
    return ManufacturedProblem(op, region, std::move(comps));
}

ConvergenceStudy convergence_study(const ManufacturedProblem& problem, const std::vector<int>& grids,
                                   const SolveOptions& options)
{
    if (grids.size() < 3) throw DomainError("convergence study: need at least 3 grids");
    for (std::size_t q = 1; q < grids.size(); ++q)
        if (grids[q] != 2 * grids[q - 1] - 1) throw DomainError("convergence study: grids must refine 2:1");

    const int N = problem.components();
    ConvergenceStudy study;
    for (int G : grids) {
        auto grid = std::make_shared<const MappedGrid>(problem.region(), G, G);
        const LinearSystem sys = assemble(problem.op(), *grid, problem.boundary(), problem.source_function());
        const SolutionField u = solve_system(sys, grid, options);

        ConvergenceRow row;
        row.grid = G;
        row.linf_per_component.assign(N, 0.0);
        std::vector<double> err(u.values.size());
        for (int nd = 0; nd < grid->nodes(); ++nd) {
            const auto exact = problem.values(grid->physical_node(nd));
            for (int l = 0; l < N; ++l) {
                const double e = u.at(l, nd) - exact[l];
                err[static_cast<std::size_t>(l) * grid->nodes() + nd] = e;
                row.linf_per_component[l] = std::max(row.linf_per_component[l], std::abs(e));
            }
        }
        for (double e : row.linf_per_component) row.linf = std::max(row.linf, e);
        row.l2 = l2_norm(*grid, N, err);

        row.order_per_component.assign(N, std::nullopt);
        if (!study.rows.empty()) {
            const ConvergenceRow& prev = study.rows.back();
            auto order = [](double coarse, double fine) -> std::optional<double> {
                if (coarse > 0.0 && fine > 0.0) return std::log2(coarse / fine);
                return std::nullopt;
            };
            row.order_linf = order(prev.linf, row.linf);
            row.order_l2 = order(prev.l2, row.l2);
            for (int l = 0; l < N; ++l)
                row.order_per_component[l] = order(prev.linf_per_component[l], row.linf_per_component[l]);
            // Differences at the rounding floor carry no convergence information.
            const bool resolved = row.linf > 1e-11 || prev.linf > 1e-11;
            if (resolved && (row.linf > prev.linf || row.l2 > prev.l2)) study.monotone = false;
        }
        study.rows.push_back(std::move(row));
    }
    return study;
}

} // namespace narrowgap
