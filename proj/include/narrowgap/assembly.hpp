#ifndef NARROWGAP_ASSEMBLY_HPP
#define NARROWGAP_ASSEMBLY_HPP

#include <functional>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "narrowgap/auxiliary.hpp"
#include "narrowgap/grid.hpp"
#include "narrowgap/operators.hpp"

namespace narrowgap {

/// How the lateral boundary |x'_a| = r_solve is closed.
enum class LateralClosure {
    utilde,   // u = linear interpolant of the top/bottom data
    constant, // u = (g+ + g-)/2 at interior heights
};

/// Prescribed values at a boundary node: physical point, mapped height t,
/// output of size N.
using BoundaryValues = std::function<void(const Vec& x, double t, std::span<double> out)>;
/// Right-hand side f of L u = f at a physical point, output of size N.
using NodalSource = std::function<void(const Vec& x, std::span<double> out)>;

/// Unknowns are ordered component-major: comp * nodes + node.
struct LinearSystem {
    Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
    Eigen::VectorXd rhs;
    int components = 0;
    int nodes = 0;
    /// Per unknown: 1 for a Dirichlet row.
    std::vector<char> dirichlet;

    int unknown(int comp, int node) const { return comp * nodes + node; }
    int size() const { return components * nodes; }
};

/// Conservative finite differences of L u = f on the mapped grid.
///
/// Dirichlet rows are identity rows; their columns are eliminated from the
/// interior rows so the pattern stays symmetric. Interior rows carry the
/// negated operator (positive diagonal). Throws DomainError on non-finite
/// coefficients.
LinearSystem assemble(const EllipticOperator& op, const MappedGrid& grid, const BoundaryValues& boundary,
                      const NodalSource& source = {});

/// Top/bottom data with the chosen lateral closure.
LinearSystem assemble(const EllipticOperator& op, const MappedGrid& grid, const BoundaryData& data,
                      LateralClosure closure = LateralClosure::utilde, const NodalSource& source = {});

/// Boundary values induced by the data and closure, usable with the generic overload.
BoundaryValues closure_values(const BoundaryData& data, LateralClosure closure);

} // namespace narrowgap

#endif
