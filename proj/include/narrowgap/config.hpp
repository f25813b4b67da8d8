#ifndef NARROWGAP_CONFIG_HPP
#define NARROWGAP_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "narrowgap/sweep.hpp"

namespace narrowgap {

/// Parsed run configuration.
///
/// The file is a sequence of `[section]` headers and `key = value` lines;
/// `#` starts a comment, expressions are double-quoted. Sections and keys:
///
///   [region]   n, epsilon, epsilons (comma list), r_solve, r_analyze, h1, h2, kappa0, kappa1
///   [operator] kind (laplace|lame|custom), lame_lambda, lame_mu, components,
///              A_i_j_a_b, B_i_j_a, C_i_j_b, D_i_j (1-based, expressions in x1..xn),
///              lambda_claim, Lambda_claim, kappa2_claim, ellipticity_trials
///   [data]     g_plus_l, g_minus_l (expressions in x1..x{n-1})
///   [solver]   nx, nt, tol, method (auto|direct|krylov)
///   [analysis] R0, scenario, metric (center_grad|sup_grad), sup_region (inner|origin),
///              seed, expected_slope, slope_tolerance
///   [mms]      u_star_l, grids, expected_order, order_tolerance
///   [flags]    allow_degenerate_geometry (true|false), lateral_closure (utilde|constant)
///
/// Unknown sections or keys, duplicates and malformed values throw
/// ConfigError; malformed expressions throw ParseError.
struct RunConfig {
    int n = 2;
    std::optional<double> epsilon;
    std::vector<double> epsilons;
    double r_solve = 1.0;
    double r_analyze = 0.5;
    std::string h1 = "0.5*x1^2";
    std::string h2 = "-0.5*x1^2";
    double kappa0 = 1.0;
    double kappa1 = 100.0;

    std::string kind = "laplace";
    double lame_lambda = 1.0;
    double lame_mu = 1.0;
    int components = 1; // custom operators only
    std::map<std::string, std::string> coefficients; // "A_1_1_1_1" -> expression
    std::optional<double> lambda_claim;
    std::optional<double> Lambda_claim;
    std::optional<double> kappa2_claim;
    int ellipticity_trials = 64;

    std::vector<std::string> g_plus;
    std::vector<std::string> g_minus;

    int nx = 65;
    int nt = 33;
    double tol = 1e-10;
    SolveMethod method = SolveMethod::automatic;

    double R0 = 0.25;
    std::string scenario = "custom";
    Metric metric = Metric::center_grad;
    SupRegion sup_region = SupRegion::inner;
    std::uint64_t seed = 1;
    std::optional<double> expected_slope;
    double slope_tolerance = 0.05;

    std::vector<std::string> u_star;
    std::vector<int> grids{17, 33, 65};
    double expected_order = 2.0;
    double order_tolerance = 0.2;

    bool allow_degenerate_geometry = false;
    LateralClosure lateral_closure = LateralClosure::utilde;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Comma-separated list of numbers.
std::vector<double> parse_number_list(std::string_view text);

GapProfile build_profile(const RunConfig& cfg);
NarrowRegion build_region(const RunConfig& cfg, double epsilon);
EllipticOperator build_operator(const RunConfig& cfg);
BoundaryData build_data(const RunConfig& cfg);
SolveOptions build_solve_options(const RunConfig& cfg);
AnalysisOptions build_analysis_options(const RunConfig& cfg);
ProblemSpec build_problem(const RunConfig& cfg, double epsilon);

} // namespace narrowgap

#endif
