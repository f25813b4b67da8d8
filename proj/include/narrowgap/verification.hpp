#ifndef NARROWGAP_VERIFICATION_HPP
#define NARROWGAP_VERIFICATION_HPP

#include <optional>
#include <string>
#include <vector>

#include "narrowgap/assembly.hpp"
#include "narrowgap/expression.hpp"
#include "narrowgap/linear_solver.hpp"

namespace narrowgap {

/// b + (a - b)(x_n + eps/2)/eps per component: the exact flat-gap solution
/// for constant data and constant-coefficient second-order operators.
std::vector<double> flat_gap_exact(double epsilon, const std::vector<double>& a, const std::vector<double>& b,
                                   const Vec& x, int n);

/// sin or cos of freq . y + phase.
struct Trig {
    bool cosine = false;
    Vec freq{};
    double phase = 0.0;
};

/// coeff * x'^xexp * t^tpow * [trig in x'] * [trig in t], where t is the
/// normalized height ubar.
struct ManufacturedTerm {
    double coeff = 1.0;
    Exponent xexp{};
    int tpow = 0;
    std::optional<Trig> xtrig;
    std::optional<Trig> ttrig; // only freq[0] is used
};

using ManufacturedComponent = std::vector<ManufacturedTerm>;

/// Parse one component, e.g. "sin(x1)*t + 0.5*x1^2*cos(2*t + 1)".
///
///   expr   := ['+'|'-'] term (('+'|'-') term)*
///   term   := factor ('*' factor)*
///   factor := number | xK ['^' int] | t ['^' int] | (sin|cos) '(' linear ')'
///
/// Trig arguments are linear in x' or linear in t; at most one trig factor of
/// each kind per term. Throws ParseError otherwise.
ManufacturedComponent parse_manufactured(std::string_view text, int tangential_dim);

/// A chosen field u* with its exact source L u* and traces.
class ManufacturedProblem {
public:
    ManufacturedProblem(EllipticOperator op, NarrowRegion region, std::vector<ManufacturedComponent> u_star);

    const EllipticOperator& op() const { return op_; }
    const NarrowRegion& region() const { return region_; }
    int components() const { return static_cast<int>(u_star_.size()); }

    /// Exact value, gradient and Hessian of every component at a physical point.
    std::vector<Jet> jets(const Vec& x) const;
    std::vector<double> values(const Vec& x) const;
    /// L u* evaluated exactly.
    std::vector<double> source(const Vec& x) const;

    BoundaryValues boundary() const;
    NodalSource source_function() const;

private:
    EllipticOperator op_;
    NarrowRegion region_;
    std::vector<ManufacturedComponent> u_star_;
};

ManufacturedProblem manufactured_problem(const EllipticOperator& op, const NarrowRegion& region,
                                         const std::vector<std::string>& u_star);

struct ConvergenceRow {
    int grid = 0; // nx = nt = grid
    double linf = 0.0;
    double l2 = 0.0;
    std::vector<double> linf_per_component;
    std::optional<double> order_linf; // log2(previous / current)
    std::optional<double> order_l2;
    std::vector<std::optional<double>> order_per_component;
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    /// False when some error above 1e-11 failed to decrease under refinement.
    bool monotone = true;
};

/// Needs at least 3 grids, each the 2:1 refinement of the previous.
ConvergenceStudy convergence_study(const ManufacturedProblem& problem, const std::vector<int>& grids,
                                   const SolveOptions& options = {});

} // namespace narrowgap

#endif
