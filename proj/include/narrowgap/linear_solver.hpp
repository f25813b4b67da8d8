#ifndef NARROWGAP_LINEAR_SOLVER_HPP
#define NARROWGAP_LINEAR_SOLVER_HPP

#include <memory>
#include <string>
#include <vector>

#include "narrowgap/assembly.hpp"
#include "narrowgap/grid.hpp"

namespace narrowgap {

enum class SolveMethod {
    automatic, // direct up to kDirectLimit unknowns, Krylov beyond
    direct,
    krylov,
};

inline constexpr int kDirectLimit = 200000;

struct SolveOptions {
    double tol = 1e-10;
    SolveMethod method = SolveMethod::automatic;
    int max_iterations = 4000;
    LateralClosure closure = LateralClosure::utilde;
};

/// Nodal values of all components on a grid, component-major.
struct SolutionField {
    std::shared_ptr<const MappedGrid> grid;
    int components = 0;
    std::vector<double> values;
    double residual = 0.0; // ||b - A x|| / ||b||
    std::vector<double> residual_history;
    std::string method;

    double at(int comp, int node) const { return values[static_cast<std::size_t>(comp) * grid->nodes() + node]; }
    double& at(int comp, int node) { return values[static_cast<std::size_t>(comp) * grid->nodes() + node]; }
};

/// Throws SolverError when the relative residual cannot be brought below tol.
SolutionField solve_system(const LinearSystem& system, std::shared_ptr<const MappedGrid> grid,
                           const SolveOptions& options = {});

/// Assemble and solve L u = 0 with the given data.
SolutionField solve(const EllipticOperator& op, std::shared_ptr<const MappedGrid> grid, const BoundaryData& data,
                    const SolveOptions& options = {});

/// Solve with only component l (0-based) of the data retained.
SolutionField solve_component(const EllipticOperator& op, std::shared_ptr<const MappedGrid> grid,
                              const BoundaryData& data, int l, const SolveOptions& options = {});

} // namespace narrowgap

#endif
