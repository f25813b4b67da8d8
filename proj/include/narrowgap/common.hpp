#ifndef NARROWGAP_COMMON_HPP
#define NARROWGAP_COMMON_HPP

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace narrowgap {

/// Spatial dimension is at most 3; points and small tensors live in fixed arrays.
inline constexpr int kMaxDim = 3;

using Vec = std::array<double, kMaxDim>;
using Mat = std::array<Vec, kMaxDim>;

inline double norm(const Vec& v, int dim)
{
    double s = 0.0;
    for (int a = 0; a < dim; ++a) s += v[a] * v[a];
    return std::sqrt(s);
}

inline double frobenius(const Mat& m, int dim)
{
    double s = 0.0;
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) s += m[a][b] * m[a][b];
    return std::sqrt(s);
}

/// Value, gradient and Hessian of a scalar function at one point.
struct Jet {
    double value = 0.0;
    Vec grad{};
    Mat hess{};
};

// Error hierarchy. The CLI maps these onto exit codes.

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace narrowgap

#endif
