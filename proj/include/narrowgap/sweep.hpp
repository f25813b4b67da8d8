#ifndef NARROWGAP_SWEEP_HPP
#define NARROWGAP_SWEEP_HPP

#include <optional>
#include <string>
#include <vector>

#include "narrowgap/analysis.hpp"

namespace narrowgap {

/// Everything needed to solve and analyse one member of an eps-sweep.
struct ProblemSpec {
    NarrowRegion region; // epsilon is overridden per member
    EllipticOperator op;
    BoundaryData data;
    int nx = 65; // at the reference (smallest) epsilon
    int nt = 33;
    SolveOptions solve;
    AnalysisOptions analysis;
    bool richardson = true;
};

enum class Metric { center_grad, sup_grad };

double metric_value(const BoundReport& report, Metric metric);

struct SweepMember {
    BoundReport report;
    double metric = 0.0;
    std::optional<double> coarse_metric;
    /// |fine - coarse| / |fine|.
    std::optional<double> richardson_change;
    bool richardson_ok = true;
};

/// Tangential resolution grows like 1/sqrt(eps): nx(eps) = 4 q + 1 with q the
/// integer nearest (nx_ref - 1) sqrt(eps_ref/eps) / 4, so the half-resolution
/// grid used by the Richardson check is again odd. At least 9.
int scaled_nx(int nx_ref, double eps_ref, double eps);

/// Relative Richardson tolerance between the grid and its half-resolution partner.
inline constexpr double kRichardsonTolerance = 0.02;

/// Solve and analyse one epsilon; with `richardson`, also on the coarse grid
/// ((nx+1)/2, (nt+1)/2) and compare the metric on the nodes both grids share.
/// The check is skipped (no coarse metric) when the coarse grid would be even
/// or smaller than 9.
SweepMember run_member(const ProblemSpec& spec, double epsilon, int nx, int nt, Metric metric);

struct SweepResult {
    std::vector<SweepMember> members;
    RateFit fit;
    Metric metric = Metric::center_grad;
    bool all_richardson_ok() const;
};

/// Members run on up to `jobs` threads; results are ordered like `epsilons`
/// (which must be strictly decreasing).
SweepResult sweep_and_fit(const ProblemSpec& spec, const std::vector<double>& epsilons, Metric metric, int jobs = 1);

} // namespace narrowgap

#endif
