#include "narrowgap/linear_solver.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

namespace narrowgap {

namespace {

using RowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

double relative_residual(const RowMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b)
{
    const double bn = b.norm();
    const double rn = (b - a * x).norm();
    return bn > 0.0 ? rn / bn : rn;
}

std::string history_text(const std::vector<double>& hist)
{
    std::ostringstream os;
    os.precision(3);
    const std::size_t first = hist.size() > 8 ? hist.size() - 8 : 0;
    os << "[";
    for (std::size_t q = first; q < hist.size(); ++q) os << (q > first ? ", " : "") << hist[q];
    os << "]";
    return os.str();
}

Eigen::VectorXd solve_direct(const RowMatrix& a, const Eigen::VectorXd& b, double tol, std::vector<double>& hist)
{
    Eigen::SparseMatrix<double> cm(a);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(cm);
    lu.factorize(cm);
    if (lu.info() != Eigen::Success) throw SolverError("direct solve: factorization failed: " + lu.lastErrorMessage());
    Eigen::VectorXd x = lu.solve(b);
    hist.push_back(relative_residual(a, x, b));
    // A couple of refinement sweeps absorb the rounding of the factors.
    for (int sweep = 0; sweep < 3 && hist.back() > tol; ++sweep) {
        x += lu.solve(b - a * x);
        hist.push_back(relative_residual(a, x, b));
    }
    return x;
}

/// Right-preconditioned BiCGSTAB with an incomplete LU preconditioner.
Eigen::VectorXd solve_krylov(const RowMatrix& a, const Eigen::VectorXd& b, double tol, int max_iter,
                             std::vector<double>& hist)
{
    Eigen::SparseMatrix<double> cm(a);
    Eigen::IncompleteLUT<double> ilu;
    ilu.setDroptol(1e-6);
    ilu.setFillfactor(20);
    ilu.compute(cm);
    if (ilu.info() != Eigen::Success) throw SolverError("krylov solve: incomplete factorization failed");

    const double bn = b.norm();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
    if (bn == 0.0) {
        hist.push_back(0.0);
        return x;
    }
    Eigen::VectorXd r = b;
    const Eigen::VectorXd r0 = r;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(b.size());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(b.size());
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    hist.push_back(1.0);
    for (int it = 0; it < max_iter; ++it) {
        const double rho_new = r0.dot(r);
        if (std::abs(rho_new) < 1e-300) break;
        if (it == 0) {
            p = r;
        } else {
            const double beta = (rho_new / rho) * (alpha / omega);
            p = r + beta * (p - omega * v);
        }
        rho = rho_new;
        const Eigen::VectorXd ph = ilu.solve(p);
        v = a * ph;
        const double r0v = r0.dot(v);
        if (std::abs(r0v) < 1e-300) break;
        alpha = rho / r0v;
        const Eigen::VectorXd s = r - alpha * v;
        x += alpha * ph;
        if (s.norm() / bn <= tol) {
            hist.push_back(relative_residual(a, x, b));
            if (hist.back() <= tol) return x;
            r = b - a * x;
            continue;
        }
        const Eigen::VectorXd sh = ilu.solve(s);
        const Eigen::VectorXd ts = a * sh;
        const double tt = ts.squaredNorm();
        if (tt == 0.0) break;
        omega = ts.dot(s) / tt;
        x += omega * sh;
        r = s - omega * ts;
        hist.push_back(r.norm() / bn);
        if (hist.back() <= tol) {
            // Confirm with the true residual; recurrence drift restarts the loop.
            const double true_res = relative_residual(a, x, b);
            hist.back() = true_res;
            if (true_res <= tol) return x;
            r = b - a * x;
        }
        if (omega == 0.0) break;
    }
    return x;
}

} // namespace

SolutionField solve_system(const LinearSystem& system, std::shared_ptr<const MappedGrid> grid,
                           const SolveOptions& options)
{
    SolveMethod method = options.method;
    if (method == SolveMethod::automatic)
        method = system.size() <= kDirectLimit ? SolveMethod::direct : SolveMethod::krylov;

    SolutionField out;
    out.grid = std::move(grid);
    out.components = system.components;
    Eigen::VectorXd x;
    if (method == SolveMethod::direct) {
        out.method = "direct";
        x = solve_direct(system.matrix, system.rhs, options.tol, out.residual_history);
    } else {
        out.method = "krylov";
        x = solve_krylov(system.matrix, system.rhs, options.tol, options.max_iterations, out.residual_history);
    }
    out.residual = relative_residual(system.matrix, x, system.rhs);
    if (!std::isfinite(out.residual) || out.residual > options.tol) {
        std::ostringstream os;
        os << out.method << " solve: relative residual " << out.residual << " above tolerance " << options.tol
           << " after " << out.residual_history.size() << " steps, history " << history_text(out.residual_history);
        throw SolverError(os.str());
    }
    out.values.assign(x.data(), x.data() + x.size());
    // Boundary rows are identity rows; copy the data verbatim.
    for (int u = 0; u < system.size(); ++u)
        if (system.dirichlet[u]) out.values[u] = system.rhs[u];
    return out;
}

SolutionField solve(const EllipticOperator& op, std::shared_ptr<const MappedGrid> grid, const BoundaryData& data,
                    const SolveOptions& options)
{
    const LinearSystem sys = assemble(op, *grid, data, options.closure);
    return solve_system(sys, std::move(grid), options);
}

SolutionField solve_component(const EllipticOperator& op, std::shared_ptr<const MappedGrid> grid,
                              const BoundaryData& data, int l, const SolveOptions& options)
{
    if (l < 0 || l >= data.components()) throw DomainError("solve_component: component index out of range");
    return solve(op, std::move(grid), data.component_only(l), options);
}

} // namespace narrowgap
