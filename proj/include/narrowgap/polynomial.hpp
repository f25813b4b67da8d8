#ifndef NARROWGAP_POLYNOMIAL_HPP
#define NARROWGAP_POLYNOMIAL_HPP

#include <array>
#include <span>
#include <string>
#include <vector>

#include "narrowgap/common.hpp"

namespace narrowgap {

inline constexpr int kMaxDegree = 8;

using Exponent = std::array<int, kMaxDim>;

/// Multivariate polynomial in up to three variables with exact calculus.
///
/// Terms are kept in canonical form: sorted by exponent, no zero
/// coefficients, no duplicate exponents. Evaluation of derivatives is
/// exact (no differencing).
class Polynomial {
public:
    struct Term {
        Exponent exp{};
        double coeff = 0.0;
    };

    Polynomial() = default;
    explicit Polynomial(int n_vars);

    static Polynomial constant(int n_vars, double c);
    static Polynomial variable(int n_vars, int index);
    static Polynomial monomial(int n_vars, const Exponent& exp, double coeff);

    int n_vars() const { return n_vars_; }
    int degree() const;
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    double coefficient(const Exponent& exp) const;
    std::span<const Term> terms() const { return terms_; }

    double value(const Vec& x) const;
    /// order 0, 1 or 2; unrequested parts of the jet are left zero.
    Jet jet(const Vec& x, int order) const;

    Polynomial derivative(int var) const;
    /// p(scale[k] * y_k + shift[k]) as a polynomial in y.
    Polynomial compose_affine(const Vec& scale, const Vec& shift) const;
    /// Same polynomial viewed in a space with more variables (new ones unused).
    Polynomial embed(int n_vars) const;

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(double s);
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
    friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    Polynomial pow(int k) const;

    std::string str() const;

private:
    void add_term(const Exponent& exp, double coeff);
    void canonicalize();

    int n_vars_ = 0;
    std::vector<Term> terms_;
};

} // namespace narrowgap

#endif
