#ifndef NARROWGAP_REPORT_IO_HPP
#define NARROWGAP_REPORT_IO_HPP

#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "narrowgap/analysis.hpp"
#include "narrowgap/sweep.hpp"
#include "narrowgap/verification.hpp"

namespace narrowgap {

using Json = nlohmann::ordered_json;

/// The bound report with exactly the published key set. Missing quantities
/// and an absent rate fit are written as null.
Json report_json(const BoundReport& report, const std::optional<RateFit>& fit = std::nullopt);

/// Quantities not in the published report: centre gradient, shared-node sup,
/// normal profile, norms, window energy and the seed.
Json diagnostics_json(const BoundReport& report, std::uint64_t seed);

/// Fit with its points, conclusiveness and per-member Richardson outcome.
Json rate_fit_json(const SweepResult& sweep);

Json convergence_json(const ConvergenceStudy& study);

/// One row per node: x1..x{n-1}, xn, t, u_1..u_N, grad_norm, 17 significant digits.
void write_field_csv(std::ostream& out, const SolutionField& u, const GradientField& grad);

/// Write `j` with a trailing newline; throws std::runtime_error on I/O failure.
void write_json_file(const std::string& path, const Json& j);
Json read_json_file(const std::string& path);

} // namespace narrowgap

#endif
