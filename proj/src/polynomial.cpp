#include "narrowgap/polynomial.hpp"

#include <algorithm>
#include <sstream>

namespace narrowgap {

namespace {

bool less_exp(const Exponent& a, const Exponent& b)
{
    return a < b;
}

int total_degree(const Exponent& e)
{
    return e[0] + e[1] + e[2];
}

// powers[k][p] = x_k^p for p up to kMaxDegree
using PowerTable = std::array<std::array<double, kMaxDegree + 1>, kMaxDim>;

PowerTable make_powers(const Vec& x, int n_vars)
{
    PowerTable t{};
    for (int k = 0; k < kMaxDim; ++k) {
        t[k][0] = 1.0;
        const double xk = k < n_vars ? x[k] : 0.0;
        for (int p = 1; p <= kMaxDegree; ++p) t[k][p] = t[k][p - 1] * xk;
    }
    return t;
}

double binomial(int n, int k)
{
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace

Polynomial::Polynomial(int n_vars) : n_vars_(n_vars)
{
    if (n_vars < 0 || n_vars > kMaxDim) throw std::invalid_argument("polynomial: unsupported variable count");
}

Polynomial Polynomial::constant(int n_vars, double c)
{
    Polynomial p(n_vars);
    p.add_term(Exponent{}, c);
    return p;
}

Polynomial Polynomial::variable(int n_vars, int index)
{
    if (index < 0 || index >= n_vars) throw std::invalid_argument("polynomial: variable index out of range");
    Exponent e{};
    e[index] = 1;
    return monomial(n_vars, e, 1.0);
}

Polynomial Polynomial::monomial(int n_vars, const Exponent& exp, double coeff)
{
    Polynomial p(n_vars);
    for (int k = n_vars; k < kMaxDim; ++k)
        if (exp[k] != 0) throw std::invalid_argument("polynomial: exponent on unused variable");
    p.add_term(exp, coeff);
    return p;
}

int Polynomial::degree() const
{
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, total_degree(t.exp));
    return d;
}

bool Polynomial::is_constant() const
{
    return terms_.empty() || (terms_.size() == 1 && total_degree(terms_[0].exp) == 0);
}

double Polynomial::coefficient(const Exponent& exp) const
{
    auto it = std::lower_bound(terms_.begin(), terms_.end(), exp,
                               [](const Term& t, const Exponent& e) { return less_exp(t.exp, e); });
    return (it != terms_.end() && it->exp == exp) ? it->coeff : 0.0;
}

void Polynomial::add_term(const Exponent& exp, double coeff)
{
    if (total_degree(exp) > kMaxDegree) throw DomainError("polynomial: total degree exceeds 8");
    if (coeff == 0.0) return;
    auto it = std::lower_bound(terms_.begin(), terms_.end(), exp,
                               [](const Term& t, const Exponent& e) { return less_exp(t.exp, e); });
    if (it != terms_.end() && it->exp == exp) {
        it->coeff += coeff;
        if (it->coeff == 0.0) terms_.erase(it);
    } else {
        terms_.insert(it, Term{exp, coeff});
    }
}

void Polynomial::canonicalize()
{
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return less_exp(a.exp, b.exp); });
    std::vector<Term> merged;
    for (const auto& t : terms_) {
        if (!merged.empty() && merged.back().exp == t.exp)
            merged.back().coeff += t.coeff;
        else
            merged.push_back(t);
    }
    std::erase_if(merged, [](const Term& t) { return t.coeff == 0.0; });
    for (const auto& t : merged)
        if (total_degree(t.exp) > kMaxDegree) throw DomainError("polynomial: total degree exceeds 8");
    terms_ = std::move(merged);
}

double Polynomial::value(const Vec& x) const
{
    if (terms_.empty()) return 0.0;
    const PowerTable pw = make_powers(x, n_vars_);
    double v = 0.0;
    for (const auto& t : terms_) v += t.coeff * pw[0][t.exp[0]] * pw[1][t.exp[1]] * pw[2][t.exp[2]];
    return v;
}

Jet Polynomial::jet(const Vec& x, int order) const
{
    Jet j;
    if (terms_.empty()) return j;
    const PowerTable pw = make_powers(x, n_vars_);
    auto factor = [&](int k, int e, int d) -> double {
        // d-th derivative of x_k^e
        if (e < d) return 0.0;
        double c = 1.0;
        for (int i = 0; i < d; ++i) c *= (e - i);
        return c * pw[k][e - d];
    };
    for (const auto& t : terms_) {
        const auto& e = t.exp;
        j.value += t.coeff * pw[0][e[0]] * pw[1][e[1]] * pw[2][e[2]];
        if (order < 1) continue;
        for (int a = 0; a < n_vars_; ++a) {
            if (e[a] == 0) continue;
            double g = t.coeff;
            for (int k = 0; k < kMaxDim; ++k) g *= factor(k, e[k], k == a ? 1 : 0);
            j.grad[a] += g;
        }
        if (order < 2) continue;
        for (int a = 0; a < n_vars_; ++a) {
            for (int b = a; b < n_vars_; ++b) {
                double h = t.coeff;
                for (int k = 0; k < kMaxDim; ++k) {
                    const int d = (k == a) + (k == b);
                    h *= factor(k, e[k], d);
                }
                j.hess[a][b] += h;
            }
        }
    }
    for (int a = 0; a < n_vars_; ++a)
        for (int b = 0; b < a; ++b) j.hess[a][b] = j.hess[b][a];
    return j;
}

Polynomial Polynomial::derivative(int var) const
{
    if (var < 0 || var >= n_vars_) throw std::invalid_argument("polynomial: derivative variable out of range");
    Polynomial d(n_vars_);
    for (const auto& t : terms_) {
        if (t.exp[var] == 0) continue;
        Exponent e = t.exp;
        const double c = t.coeff * e[var];
        e[var] -= 1;
        d.terms_.push_back(Term{e, c});
    }
    d.canonicalize();
    return d;
}

Polynomial Polynomial::compose_affine(const Vec& scale, const Vec& shift) const
{
    Polynomial out(n_vars_);
    for (const auto& t : terms_) {
        // expand prod_k (s_k y_k + c_k)^{e_k}
        std::vector<Term> partial{Term{Exponent{}, t.coeff}};
        for (int k = 0; k < n_vars_; ++k) {
            const int ek = t.exp[k];
            if (ek == 0) continue;
            std::vector<Term> next;
            for (const auto& p : partial) {
                for (int m = 0; m <= ek; ++m) {
                    const double c = binomial(ek, m) * std::pow(scale[k], m) * std::pow(shift[k], ek - m);
                    if (c == 0.0) continue;
                    Exponent e = p.exp;
                    e[k] += m;
                    next.push_back(Term{e, p.coeff * c});
                }
            }
            partial = std::move(next);
        }
        out.terms_.insert(out.terms_.end(), partial.begin(), partial.end());
    }
    out.canonicalize();
    return out;
}

Polynomial Polynomial::embed(int n_vars) const
{
    if (n_vars < n_vars_) throw std::invalid_argument("polynomial: cannot embed into fewer variables");
    Polynomial p = *this;
    p.n_vars_ = n_vars;
    return p;
}

Polynomial& Polynomial::operator+=(const Polynomial& o)
{
    n_vars_ = std::max(n_vars_, o.n_vars_);
    for (const auto& t : o.terms_) add_term(t.exp, t.coeff);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o)
{
    n_vars_ = std::max(n_vars_, o.n_vars_);
    for (const auto& t : o.terms_) add_term(t.exp, -t.coeff);
    return *this;
}

Polynomial& Polynomial::operator*=(double s)
{
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& t : terms_) t.coeff *= s;
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b)
{
    Polynomial p(std::max(a.n_vars_, b.n_vars_));
    for (const auto& ta : a.terms_) {
        for (const auto& tb : b.terms_) {
            Exponent e{};
            for (int k = 0; k < kMaxDim; ++k) e[k] = ta.exp[k] + tb.exp[k];
            p.terms_.push_back(Polynomial::Term{e, ta.coeff * tb.coeff});
        }
    }
    p.canonicalize();
    return p;
}

Polynomial Polynomial::pow(int k) const
{
    if (k < 0) throw std::invalid_argument("polynomial: negative power");
    Polynomial r = constant(n_vars_, 1.0);
    for (int i = 0; i < k; ++i) r = r * *this;
    return r;
}

std::string Polynomial::str() const
{
    if (terms_.empty()) return "0";
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& t : terms_) {
        if (!first) os << (t.coeff < 0 ? " - " : " + ");
        else if (t.coeff < 0) os << "-";
        first = false;
        os << std::abs(t.coeff);
        for (int k = 0; k < n_vars_; ++k) {
            if (t.exp[k] == 0) continue;
            os << "*x" << (k + 1);
            if (t.exp[k] > 1) os << "^" << t.exp[k];
        }
    }
    return os.str();
}

} // namespace narrowgap
