#include "narrowgap/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <memory>
#include <thread>

namespace narrowgap {

double metric_value(const BoundReport& report, Metric metric)
{
    return metric == Metric::center_grad ? report.center_grad : report.sup_grad;
}

int scaled_nx(int nx_ref, double eps_ref, double eps)
{
    const double quarter = 0.25 * (nx_ref - 1) * std::sqrt(eps_ref / eps);
    return std::max(9, 4 * static_cast<int>(std::lround(quarter)) + 1);
}

SweepMember run_member(const ProblemSpec& spec, double epsilon, int nx, int nt, Metric metric)
{
    const NarrowRegion region = spec.region.with_epsilon(epsilon);
    auto solve_on = [&](int gx, int gt) {
        auto grid = std::make_shared<const MappedGrid>(region, gx, gt);
        const SolutionField u = solve(spec.op, grid, spec.data, spec.solve);
        return analyze(u, spec.data, spec.analysis);
    };

    SweepMember m;
    m.report = solve_on(nx, nt);
    m.metric = metric_value(m.report, metric);
    const double shared = metric == Metric::center_grad ? m.metric : m.report.sup_grad_shared;
    const int cx = (nx + 1) / 2, ct = (nt + 1) / 2;
    if (spec.richardson && cx >= 9 && ct >= 9 && cx % 2 == 1 && ct % 2 == 1) {
        m.coarse_metric = metric_value(solve_on(cx, ct), metric);
        const double scale = std::abs(shared);
        m.richardson_change = scale > 0.0 ? std::abs(shared - *m.coarse_metric) / scale
                                          : std::abs(*m.coarse_metric);
        m.richardson_ok = *m.richardson_change <= kRichardsonTolerance;
    }
    return m;
}

bool SweepResult::all_richardson_ok() const
{
    return std::all_of(members.begin(), members.end(), [](const SweepMember& m) { return m.richardson_ok; });
}

SweepResult sweep_and_fit(const ProblemSpec& spec, const std::vector<double>& epsilons, Metric metric, int jobs)
{
    if (epsilons.size() < 3) throw DomainError("sweep: need at least 3 epsilons");
    for (std::size_t q = 1; q < epsilons.size(); ++q)
        if (!(epsilons[q] < epsilons[q - 1])) throw DomainError("sweep: epsilons must be strictly decreasing");

    const double eps_ref = epsilons.back();
    SweepResult result;
    result.metric = metric;
    result.members.resize(epsilons.size());
    std::vector<std::exception_ptr> errors(epsilons.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t q = next++; q < epsilons.size(); q = next++) {
            try {
                result.members[q] = run_member(spec, epsilons[q], scaled_nx(spec.nx, eps_ref, epsilons[q]), spec.nt,
                                               metric);
            } catch (...) {
                errors[q] = std::current_exception();
            }
        }
    };
    const int threads = std::clamp(jobs, 1, static_cast<int>(epsilons.size()));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<std::pair<double, double>> pts;
    for (std::size_t q = 0; q < epsilons.size(); ++q) pts.emplace_back(epsilons[q], result.members[q].metric);
    result.fit = fit_rate(pts);
    return result;
}

} // namespace narrowgap
