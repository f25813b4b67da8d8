#include "narrowgap/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "narrowgap/config.hpp"
#include "narrowgap/expression.hpp"
#include "narrowgap/report_io.hpp"

namespace narrowgap {

namespace fs = std::filesystem;

namespace {

/// Sampling used by the geometry gate and the validate command.
constexpr int kProfileSamples = 33;
constexpr double kProfileTol = 1e-9;
constexpr int kBoundSamples = 33;
/// Errors at or below this are rounding noise; their ratios are not orders.
constexpr double kRoundingFloor = 1e-11;
/// Sweep-stability band used by the report command.
constexpr double kStabilityBand = 2.0;

/// Non-error early exit carrying a code, e.g. a failed gate.
struct GateFailure {
    int code;
    std::string message;
};

struct Options {
    std::string command;
    std::string config;
    std::optional<double> epsilon;
    std::string epsilons;
    std::string grids;
    std::string out;
    std::string in;
    int jobs = 1;
    std::optional<std::uint64_t> seed;
    bool allow_degenerate = false;
};

RunConfig load_with_overrides(const Options& o)
{
    if (o.config.empty()) throw ConfigError("--config is required for '" + o.command + "'");
    RunConfig cfg = load_config(o.config);
    if (o.epsilon) cfg.epsilon = *o.epsilon;
    if (!o.epsilons.empty()) cfg.epsilons = parse_number_list(o.epsilons);
    if (!o.grids.empty()) {
        cfg.grids.clear();
        for (double g : parse_number_list(o.grids)) {
            if (g != std::floor(g)) throw ConfigError("--grids: entries must be integers");
            cfg.grids.push_back(static_cast<int>(g));
        }
    }
    if (o.seed) cfg.seed = *o.seed;
    if (o.allow_degenerate) cfg.allow_degenerate_geometry = true;
    return cfg;
}

double single_epsilon(const RunConfig& cfg, const std::string& command)
{
    if (cfg.epsilon) return *cfg.epsilon;
    throw ConfigError("'" + command + "' needs an epsilon ([region] epsilon or --epsilon)");
}

std::vector<double> sweep_epsilons(const RunConfig& cfg)
{
    if (cfg.epsilons.empty()) throw ConfigError("'sweep' needs epsilons ([region] epsilons or --epsilons)");
    return cfg.epsilons;
}

Json checks_json(const ValidationReport& rep)
{
    Json checks = Json::array();
    for (const auto& c : rep.checks)
        checks.push_back({{"name", c.name},
                          {"passed", c.passed},
                          {"measured", c.measured},
                          {"threshold", c.threshold},
                          {"overridden", c.overridden}});
    return checks;
}

Json geometry_json(const NarrowRegion& region, const ValidationReport& rep)
{
    Json j;
    j["epsilon"] = region.epsilon();
    j["checks"] = checks_json(rep);
    j["min_eigenvalue"] = rep.min_eigenvalue;
    j["c2_norm"] = rep.c2_norm;
    j["c1"] = rep.gap_ratio_min;
    j["c2"] = rep.gap_ratio_max;
    j["gap_constant"] = rep.gap_constant;
    j["passed"] = rep.passed();
    return j;
}

std::string failed_checks(const ValidationReport& rep)
{
    std::string s;
    for (const auto& c : rep.checks)
        if (!c.passed && !c.overridden) s += (s.empty() ? "" : ", ") + c.name;
    return s;
}

/// Refuse to compute on a geometry that fails its hypotheses.
void gate_geometry(const RunConfig& cfg, double epsilon)
{
    const ValidationReport rep = validate_profile(build_region(cfg, epsilon), kProfileSamples, kProfileTol,
                                                  cfg.allow_degenerate_geometry);
    if (!rep.passed())
        throw GateFailure{exit_validation, "geometry hypotheses failed: " + failed_checks(rep) +
                                               " (use --allow-degenerate-geometry to override convexity)"};
}

void ensure_dir(const std::string& dir)
{
    if (dir.empty()) return;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& name)
{
    return (fs::path(dir) / name).string();
}

int cmd_validate(const RunConfig& cfg, const Options& o, std::ostream& out)
{
    const double eps = single_epsilon(cfg, "validate");
    const NarrowRegion region = build_region(cfg, eps);
    const ValidationReport geo = validate_profile(region, kProfileSamples, kProfileTol, cfg.allow_degenerate_geometry);
    bool passed = geo.passed();

    Json j;
    j["command"] = "validate";
    j["seed"] = cfg.seed;
    j["geometry"] = geometry_json(region, geo);

    if (!cfg.epsilons.empty()) {
        Json per = Json::array();
        std::vector<std::optional<double>> c1s, c2s;
        for (double e : cfg.epsilons) {
            const NarrowRegion r = build_region(cfg, e);
            const ValidationReport rep = validate_profile(r, kProfileSamples, kProfileTol, cfg.allow_degenerate_geometry);
            per.push_back({{"epsilon", e}, {"c1", rep.gap_ratio_min}, {"c2", rep.gap_ratio_max}});
            c1s.push_back(rep.gap_ratio_min);
            c2s.push_back(rep.gap_ratio_max);
        }
        auto sp = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
        j["gap_constants"] = {{"members", per}, {"c1_spread", sp(spread(c1s))}, {"c2_spread", sp(spread(c2s))}};
    }

    const EllipticOperator op = build_operator(cfg);
    const double ell = estimate_ellipticity(op, region, EllipticityGrid{}, cfg.ellipticity_trials, cfg.seed);
    const BoundsEstimate bounds = estimate_bounds(op, region, kBoundSamples);
    Json claims = Json::array();
    auto claim = [&](const char* name, bool ok, double measured, double claimed) {
        claims.push_back({{"name", name}, {"passed", ok}, {"measured", measured}, {"claimed", claimed}});
        passed = passed && ok;
    };
    claim("ellipticity_positive", ell > 0.0, ell, 0.0);
    if (cfg.lambda_claim) claim("lambda_claim", ell >= *cfg.lambda_claim, ell, *cfg.lambda_claim);
    if (cfg.Lambda_claim) claim("Lambda_claim", bounds.Lambda <= *cfg.Lambda_claim, bounds.Lambda, *cfg.Lambda_claim);
    if (cfg.kappa2_claim) claim("kappa2_claim", bounds.kappa2 <= *cfg.kappa2_claim, bounds.kappa2, *cfg.kappa2_claim);
    j["operator"] = {{"kind", cfg.kind},
                     {"n", op.n()},
                     {"N", op.N()},
                     {"ellipticity_estimate", ell},
                     {"ellipticity_trials", cfg.ellipticity_trials},
                     {"Lambda", bounds.Lambda},
                     {"kappa2", bounds.kappa2},
                     {"elasticity_symmetry", has_elasticity_symmetry(op, Vec{}, 1e-14)},
                     {"lower_order_terms", op.has_lower_order()},
                     {"checks", claims}};

    const BoundaryData data = build_data(cfg);
    if (data.components() != op.N())
        throw ConfigError("data has " + std::to_string(data.components()) + " components, operator needs " +
                          std::to_string(op.N()));
    Json shape;
    for (const auto& [name, value] : check_derivative_bounds(region, data, kBoundSamples).constants) shape[name] = value;
    j["data"] = {{"components", data.components()},
                 {"c2_norm_plus", data.c2_norm_plus()},
                 {"c2_norm_minus", data.c2_norm_minus()},
                 {"derivative_bound_constants", shape}};
    j["passed"] = passed;

    out << j.dump(2) << '\n';
    if (!o.out.empty()) {
        ensure_dir(o.out);
        write_json_file(join(o.out, "validate.json"), j);
    }
    if (!passed)
        throw GateFailure{exit_validation, geo.passed() ? "operator checks failed"
                                                        : "geometry hypotheses failed: " + failed_checks(geo)};
    return exit_ok;
}

int cmd_solve(const RunConfig& cfg, const Options& o, std::ostream& out)
{
    const double eps = single_epsilon(cfg, "solve");
    gate_geometry(cfg, eps);
    const ProblemSpec spec = build_problem(cfg, eps);
    if (spec.data.components() != spec.op.N()) throw ConfigError("data and operator component counts differ");
    auto grid = std::make_shared<const MappedGrid>(spec.region, spec.nx, spec.nt);
    const SolutionField u = solve(spec.op, grid, spec.data, spec.solve);
    const BoundReport rep = analyze(u, spec.data, spec.analysis);
    const Json j = report_json(rep);
    out << j.dump(2) << '\n';
    if (!o.out.empty()) {
        ensure_dir(o.out);
        write_json_file(join(o.out, "report.json"), j);
        Json diag = diagnostics_json(rep, cfg.seed);
        diag["solver"] = {{"method", u.method}, {"residual", u.residual}, {"iterations", u.residual_history.size()}};
        write_json_file(join(o.out, "diagnostics.json"), diag);
        std::ofstream csv(join(o.out, "field.csv"), std::ios::binary);
        if (!csv) throw ConfigError("cannot write field.csv in '" + o.out + "'");
        write_field_csv(csv, u, gradient(u));
    }
    return exit_ok;
}

std::string member_file(std::size_t q)
{
    std::ostringstream s;
    s << "report_" << std::setw(2) << std::setfill('0') << q << ".json";
    return s.str();
}

int cmd_sweep(const RunConfig& cfg, const Options& o, std::ostream& out)
{
    const std::vector<double> eps = sweep_epsilons(cfg);
    for (double e : eps) gate_geometry(cfg, e);
    const ProblemSpec spec = build_problem(cfg, eps.front());
    if (spec.data.components() != spec.op.N()) throw ConfigError("data and operator component counts differ");
    const SweepResult sweep = sweep_and_fit(spec, eps, cfg.metric, std::max(1, o.jobs));

    const Json fit = rate_fit_json(sweep);
    if (!o.out.empty()) {
        ensure_dir(o.out);
        for (std::size_t q = 0; q < sweep.members.size(); ++q) {
            write_json_file(join(o.out, member_file(q)), report_json(sweep.members[q].report, sweep.fit));
            write_json_file(join(o.out, "diagnostics_" + member_file(q).substr(7)),
                            diagnostics_json(sweep.members[q].report, cfg.seed));
        }
        write_json_file(join(o.out, "rate_fit.json"), fit);
    }

    out << std::left << std::setw(12) << "epsilon" << std::setw(8) << "nx" << std::setw(8) << "nt" << std::setw(16)
        << "metric" << std::setw(14) << "richardson" << '\n';
    for (const auto& m : sweep.members) {
        std::ostringstream rich;
        if (m.richardson_change)
            rich << std::setprecision(3) << 100.0 * *m.richardson_change << '%' << (m.richardson_ok ? "" : " FAIL");
        else
            rich << "n/a";
        out << std::setw(12) << m.report.epsilon << std::setw(8) << m.report.nx << std::setw(8) << m.report.nt
            << std::setw(16) << std::setprecision(8) << m.metric << std::setw(14) << rich.str() << '\n';
    }
    out << "slope " << std::setprecision(6) << sweep.fit.slope << "  r2 " << sweep.fit.r2
        << (sweep.fit.conclusive ? "" : "  (inconclusive)") << '\n';

    if (!sweep.all_richardson_ok()) throw GateFailure{exit_gate, "Richardson check failed for a sweep member"};
    if (cfg.expected_slope && std::abs(sweep.fit.slope - *cfg.expected_slope) > cfg.slope_tolerance) {
        std::ostringstream s;
        s << "slope " << sweep.fit.slope << " outside " << *cfg.expected_slope << " +- " << cfg.slope_tolerance;
        throw GateFailure{exit_gate, s.str()};
    }
    return exit_ok;
}

int cmd_mms(const RunConfig& cfg, const Options& o, std::ostream& out)
{
    const double eps = single_epsilon(cfg, "mms");
    if (cfg.u_star.empty()) throw ConfigError("'mms' needs [mms] u_star_l entries");
    gate_geometry(cfg, eps);
    const ManufacturedProblem problem = manufactured_problem(build_operator(cfg), build_region(cfg, eps), cfg.u_star);
    const ConvergenceStudy study = convergence_study(problem, cfg.grids, build_solve_options(cfg));

    out << std::left << std::setw(8) << "grid" << std::setw(16) << "linf" << std::setw(10) << "order" << std::setw(16)
        << "l2" << std::setw(10) << "order" << '\n';
    auto ord = [](const std::optional<double>& v) {
        std::ostringstream s;
        if (v)
            s << std::fixed << std::setprecision(3) << *v;
        else
            s << '-';
        return s.str();
    };
    for (const auto& r : study.rows)
        out << std::setw(8) << r.grid << std::setw(16) << std::setprecision(6) << r.linf << std::setw(10)
            << ord(r.order_linf) << std::setw(16) << r.l2 << std::setw(10) << ord(r.order_l2) << '\n';

    Json j = convergence_json(study);
    j["epsilon"] = eps;
    j["expected_order"] = cfg.expected_order;
    j["order_tolerance"] = cfg.order_tolerance;
    if (!o.out.empty()) {
        ensure_dir(o.out);
        write_json_file(join(o.out, "mms.json"), j);
    }

    if (!study.monotone) throw GateFailure{exit_gate, "errors not monotone under refinement"};
    auto off = [&](const std::optional<double>& order) {
        return order && std::abs(*order - cfg.expected_order) > cfg.order_tolerance;
    };
    for (std::size_t q = 1; q < study.rows.size(); ++q) {
        const auto& r = study.rows[q];
        const auto& prev = study.rows[q - 1];
        if (prev.linf > kRoundingFloor && off(r.order_linf))
            throw GateFailure{exit_gate, "L-infinity order " + ord(r.order_linf) + " on grid " + std::to_string(r.grid)};
        for (std::size_t l = 0; l < r.order_per_component.size(); ++l)
            if (prev.linf_per_component[l] > kRoundingFloor && off(r.order_per_component[l]))
                throw GateFailure{exit_gate, "component " + std::to_string(l + 1) + " order " +
                                                 ord(r.order_per_component[l]) + " on grid " + std::to_string(r.grid)};
    }
    return exit_ok;
}

int cmd_report(const Options& o, std::ostream& out)
{
    if (o.in.empty()) throw ConfigError("'report' needs --in DIR");
    if (!fs::is_directory(o.in)) throw ConfigError("'" + o.in + "' is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(o.in))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::vector<Json> reports;
    Json summary;
    summary["directory"] = o.in;
    bool ok = true;
    for (const auto& p : files) {
        const std::string name = p.filename().string();
        if (name == "report.json" || (name.rfind("report_", 0) == 0 && p.extension() == ".json"))
            reports.push_back(read_json_file(p.string()));
    }
    std::sort(reports.begin(), reports.end(),
              [](const Json& a, const Json& b) { return a["epsilon"].get<double>() > b["epsilon"].get<double>(); });

    Json members = Json::array();
    for (const auto& r : reports)
        members.push_back({{"epsilon", r["epsilon"]},
                           {"sup_grad", r["sup_grad"]},
                           {"C_emp", r["C_emp"]},
                           {"c_low", r["c_low"]},
                           {"grid", r["grid"]}});
    summary["reports"] = members;

    // Sweep stability of each empirical constant.
    auto collect = [&](auto&& pick) {
        std::vector<std::optional<double>> v;
        for (const auto& r : reports) {
            const Json& x = pick(r);
            v.push_back(x.is_number() ? std::optional<double>(x.get<double>()) : std::nullopt);
        }
        return v;
    };
    Json stability;
    auto add = [&](const std::string& name, const std::vector<std::optional<double>>& v) {
        const auto s = spread(v);
        const bool stable = !s || *s < kStabilityBand;
        stability[name] = {{"spread", s ? Json(*s) : Json(nullptr)}, {"stable", stable}};
        ok = ok && stable;
    };
    if (reports.size() >= 2) {
        add("C_emp", collect([](const Json& r) -> const Json& { return r["C_emp"]; }));
        add("c_low", collect([](const Json& r) -> const Json& { return r["c_low"]; }));
        for (const char* k : {"k213", "k219", "k220", "k225", "k226"})
            add(k, collect([k](const Json& r) -> const Json& { return r["lemma_constants"][k]; }));
    }
    summary["stability_band"] = kStabilityBand;
    summary["stability"] = stability;

    const fs::path fit_path = fs::path(o.in) / "rate_fit.json";
    if (fs::exists(fit_path)) {
        const Json fit = read_json_file(fit_path.string());
        summary["rate_fit"] = fit;
        ok = ok && fit.value("richardson_ok", true);
    }
    const fs::path mms_path = fs::path(o.in) / "mms.json";
    if (fs::exists(mms_path)) {
        const Json mms = read_json_file(mms_path.string());
        summary["mms"] = mms;
        ok = ok && mms.value("monotone", true);
    }
    const fs::path val_path = fs::path(o.in) / "validate.json";
    if (fs::exists(val_path)) {
        const Json val = read_json_file(val_path.string());
        summary["validate"] = {{"passed", val["passed"]}};
        ok = ok && val.value("passed", false);
    }
    if (reports.empty() && !summary.contains("rate_fit") && !summary.contains("mms") && !summary.contains("validate"))
        throw ConfigError("no report files found in '" + o.in + "'");
    summary["passed"] = ok;

    out << summary.dump(2) << '\n';
    write_json_file(join(o.in, "summary.json"), summary);
    if (!ok) throw GateFailure{exit_gate, "consolidated report has failing entries"};
    return exit_ok;
}

void error_json(std::ostream& err, int code, const std::string& kind, const std::string& message,
                std::optional<std::size_t> position = std::nullopt)
{
    Json j;
    j["error"] = kind;
    j["message"] = message;
    if (position) j["position"] = *position;
    j["exit_code"] = code;
    err << j.dump() << '\n';
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Thin-gap elliptic solver and gradient-bound verification", "narrowgap"};
    app.add_option("command", o.command, "validate | solve | sweep | mms | report")
        ->required()
        ->check(CLI::IsMember({"validate", "solve", "sweep", "mms", "report"}));
    app.add_option("--config", o.config, "Run configuration file");
    app.add_option("--epsilon", o.epsilon, "Gap parameter for validate, solve and mms");
    app.add_option("--epsilons", o.epsilons, "Comma-separated, strictly decreasing gap parameters for sweep");
    app.add_option("--grids", o.grids, "Comma-separated grid sizes for mms (2:1 refinements)");
    app.add_option("--out", o.out, "Output directory");
    app.add_option("--in", o.in, "Input directory for report");
    app.add_option("--jobs", o.jobs, "Parallel sweep members")->check(CLI::PositiveNumber);
    app.add_option("--seed", o.seed, "Seed for randomized checks");
    app.add_flag("--allow-degenerate-geometry", o.allow_degenerate, "Accept a profile that fails strict convexity");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        error_json(err, exit_usage, "usage", e.what());
        return exit_usage;
    }

    try {
        if (o.command == "report") return cmd_report(o, out);
        const RunConfig cfg = load_with_overrides(o);
        if (o.command == "validate") return cmd_validate(cfg, o, out);
        if (o.command == "solve") return cmd_solve(cfg, o, out);
        if (o.command == "sweep") return cmd_sweep(cfg, o, out);
        return cmd_mms(cfg, o, out);
    } catch (const GateFailure& g) {
        error_json(err, g.code, g.code == exit_gate ? "gate" : "validation", g.message);
        return g.code;
    } catch (const ParseError& e) {
        error_json(err, exit_validation, "parse", e.what(), e.position());
        return exit_validation;
    } catch (const ConfigError& e) {
        error_json(err, exit_validation, "config", e.what());
        return exit_validation;
    } catch (const ValidationError& e) {
        error_json(err, exit_validation, "validation", e.what());
        return exit_validation;
    } catch (const DomainError& e) {
        error_json(err, exit_validation, "domain", e.what());
        return exit_validation;
    } catch (const SolverError& e) {
        error_json(err, exit_solver, "solver", e.what());
        return exit_solver;
    } catch (const nlohmann::json::exception& e) {
        error_json(err, exit_validation, "report", e.what());
        return exit_validation;
    } catch (const std::invalid_argument& e) {
        error_json(err, exit_validation, "domain", e.what());
        return exit_validation;
    } catch (const std::runtime_error& e) {
        error_json(err, exit_validation, "io", e.what());
        return exit_validation;
    }
}

} // namespace narrowgap
