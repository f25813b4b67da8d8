#include "narrowgap/config.hpp"

#include <charconv>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "narrowgap/expression.hpp"

namespace narrowgap {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

/// Everything before an unquoted '#'.
std::string_view strip_comment(std::string_view s)
{
    bool quoted = false;
    for (std::size_t q = 0; q < s.size(); ++q) {
        if (s[q] == '"') quoted = !quoted;
        if (s[q] == '#' && !quoted) return s.substr(0, q);
    }
    return s;
}

struct Entry {
    std::string value;
    bool quoted = false;
    int line = 0;
};

std::string where(const std::string& section, const std::string& key, int line)
{
    return "config line " + std::to_string(line) + " ([" + section + "] " + key + "): ";
}

double to_double(const std::string& s, const std::string& ctx)
{
    double v = 0.0;
    const auto t = trim(s);
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size() || t.empty())
        throw ConfigError(ctx + "expected a number, got '" + s + "'");
    return v;
}

long long to_integer(const std::string& s, const std::string& ctx)
{
    long long v = 0;
    const auto t = trim(s);
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size() || t.empty())
        throw ConfigError(ctx + "expected an integer, got '" + s + "'");
    return v;
}

bool to_bool(const std::string& s, const std::string& ctx)
{
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(ctx + "expected true or false, got '" + s + "'");
}

/// Indexed key like "g_plus_2" or "A_1_2_1_1": prefix plus `count` 1-based indices.
bool indexed_key(const std::string& key, const std::string& prefix, int count)
{
    std::string pattern = prefix;
    for (int q = 0; q < count; ++q) pattern += "_[1-9][0-9]*";
    return std::regex_match(key, std::regex(pattern));
}

std::vector<int> indices_of(const std::string& key)
{
    std::vector<int> out;
    std::stringstream ss(key);
    std::string part;
    while (std::getline(ss, part, '_'))
        if (!part.empty() && std::isdigit(static_cast<unsigned char>(part[0]))) out.push_back(std::stoi(part));
    return out;
}

void check_expression(const std::string& text, int n_vars, const std::string& ctx)
{
    try {
        (void)parse_expression(text, n_vars);
    } catch (const ParseError& e) {
        throw ParseError(e.position(), ctx + e.what());
    }
}

} // namespace

std::vector<double> parse_number_list(std::string_view text)
{
    std::vector<double> out;
    std::string s(text);
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(item, "number list: "));
    if (out.empty()) throw ConfigError("number list: empty");
    return out;
}

RunConfig parse_config(std::string_view text)
{
    static const std::set<std::string> sections{"region", "operator", "data", "solver", "analysis", "mms", "flags"};
    std::map<std::string, std::map<std::string, Entry>> raw;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        const std::string_view line_full = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;
        const auto line = trim(strip_comment(line_full));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("config line " + std::to_string(line_no) + ": malformed section");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!sections.count(section))
                throw ConfigError("config line " + std::to_string(line_no) + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        if (section.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": key outside of any section");
        const std::string key(trim(line.substr(0, eq)));
        std::string_view value = trim(line.substr(eq + 1));
        Entry e;
        e.line = line_no;
        if (!value.empty() && value.front() == '"') {
            if (value.size() < 2 || value.back() != '"')
                throw ConfigError("config line " + std::to_string(line_no) + ": unterminated string");
            value = value.substr(1, value.size() - 2);
            e.quoted = true;
        }
        e.value = std::string(value);
        if (raw[section].count(key))
            throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        raw[section][key] = e;
    }

    RunConfig cfg;
    auto unknown = [](const std::string& sec, const std::string& key, int line) {
        return ConfigError(where(sec, key, line) + "unknown key");
    };

    // Region first: n fixes the expression variable counts.
    for (const auto& [key, e] : raw["region"]) {
        const std::string ctx = where("region", key, e.line);
        if (key == "n") {
            const auto v = to_integer(e.value, ctx);
            if (v != 2 && v != 3) throw ConfigError(ctx + "n must be 2 or 3");
            cfg.n = static_cast<int>(v);
        } else if (key == "epsilon") {
            cfg.epsilon = to_double(e.value, ctx);
        } else if (key == "epsilons") {
            cfg.epsilons = parse_number_list(e.value);
        } else if (key == "r_solve") {
            cfg.r_solve = to_double(e.value, ctx);
        } else if (key == "r_analyze") {
            cfg.r_analyze = to_double(e.value, ctx);
        } else if (key == "h1") {
            cfg.h1 = e.value;
        } else if (key == "h2") {
            cfg.h2 = e.value;
        } else if (key == "kappa0") {
            cfg.kappa0 = to_double(e.value, ctx);
        } else if (key == "kappa1") {
            cfg.kappa1 = to_double(e.value, ctx);
        } else {
            throw unknown("region", key, e.line);
        }
    }
    const int d = cfg.n - 1;
    for (const char* key : {"h1", "h2"}) {
        const auto it = raw["region"].find(key);
        check_expression(key == std::string("h1") ? cfg.h1 : cfg.h2, d,
                         it == raw["region"].end() ? std::string("[region] ") + key + ": "
                                                   : where("region", key, it->second.line));
    }

    std::map<int, std::string> gp, gm, us;
    for (const auto& [key, e] : raw["operator"]) {
        const std::string ctx = where("operator", key, e.line);
        if (key == "kind") {
            if (e.value != "laplace" && e.value != "lame" && e.value != "custom")
                throw ConfigError(ctx + "kind must be laplace, lame or custom");
            cfg.kind = e.value;
        } else if (key == "lame_lambda") {
            cfg.lame_lambda = to_double(e.value, ctx);
        } else if (key == "lame_mu") {
            cfg.lame_mu = to_double(e.value, ctx);
        } else if (key == "components") {
            const auto v = to_integer(e.value, ctx);
            if (v < 1 || v > 3) throw ConfigError(ctx + "components must be 1..3");
            cfg.components = static_cast<int>(v);
        } else if (key == "lambda_claim") {
            cfg.lambda_claim = to_double(e.value, ctx);
        } else if (key == "Lambda_claim") {
            cfg.Lambda_claim = to_double(e.value, ctx);
        } else if (key == "kappa2_claim") {
            cfg.kappa2_claim = to_double(e.value, ctx);
        } else if (key == "ellipticity_trials") {
            cfg.ellipticity_trials = static_cast<int>(to_integer(e.value, ctx));
        } else if (indexed_key(key, "A", 4) || indexed_key(key, "B", 3) || indexed_key(key, "C", 3) ||
                   indexed_key(key, "D", 2)) {
            check_expression(e.value, cfg.n, ctx);
            cfg.coefficients[key] = e.value;
        } else {
            throw unknown("operator", key, e.line);
        }
    }
    if (!cfg.coefficients.empty() && cfg.kind != "custom")
        throw ConfigError("[operator]: coefficient entries require kind = custom");

    for (const auto& [key, e] : raw["data"]) {
        const std::string ctx = where("data", key, e.line);
        if (indexed_key(key, "g_plus", 1)) {
            check_expression(e.value, d, ctx);
            gp[indices_of(key)[0]] = e.value;
        } else if (indexed_key(key, "g_minus", 1)) {
            check_expression(e.value, d, ctx);
            gm[indices_of(key)[0]] = e.value;
        } else {
            throw unknown("data", key, e.line);
        }
    }
    auto dense = [](const std::map<int, std::string>& m, const std::string& what) {
        std::vector<std::string> out;
        int expect = 1;
        for (const auto& [k, v] : m) {
            if (k != expect) throw ConfigError("[data]/[mms]: " + what + " indices must be 1.." + std::to_string(m.size()));
            out.push_back(v);
            ++expect;
        }
        return out;
    };
    cfg.g_plus = dense(gp, "g_plus");
    cfg.g_minus = dense(gm, "g_minus");

    for (const auto& [key, e] : raw["solver"]) {
        const std::string ctx = where("solver", key, e.line);
        if (key == "nx") {
            cfg.nx = static_cast<int>(to_integer(e.value, ctx));
        } else if (key == "nt") {
            cfg.nt = static_cast<int>(to_integer(e.value, ctx));
        } else if (key == "tol") {
            cfg.tol = to_double(e.value, ctx);
            if (!(cfg.tol > 0.0)) throw ConfigError(ctx + "tol must be positive");
        } else if (key == "method") {
            if (e.value == "auto")
                cfg.method = SolveMethod::automatic;
            else if (e.value == "direct")
                cfg.method = SolveMethod::direct;
            else if (e.value == "krylov")
                cfg.method = SolveMethod::krylov;
            else
                throw ConfigError(ctx + "method must be auto, direct or krylov");
        } else {
            throw unknown("solver", key, e.line);
        }
    }

    for (const auto& [key, e] : raw["analysis"]) {
        const std::string ctx = where("analysis", key, e.line);
        if (key == "R0") {
            cfg.R0 = to_double(e.value, ctx);
        } else if (key == "scenario") {
            cfg.scenario = e.value;
        } else if (key == "metric") {
            if (e.value == "center_grad")
                cfg.metric = Metric::center_grad;
            else if (e.value == "sup_grad")
                cfg.metric = Metric::sup_grad;
            else
                throw ConfigError(ctx + "metric must be center_grad or sup_grad");
        } else if (key == "sup_region") {
            if (e.value == "inner")
                cfg.sup_region = SupRegion::inner;
            else if (e.value == "origin")
                cfg.sup_region = SupRegion::origin;
            else
                throw ConfigError(ctx + "sup_region must be inner or origin");
        } else if (key == "seed") {
            const auto v = to_integer(e.value, ctx);
            if (v < 0) throw ConfigError(ctx + "seed must be non-negative");
            cfg.seed = static_cast<std::uint64_t>(v);
        } else if (key == "expected_slope") {
            cfg.expected_slope = to_double(e.value, ctx);
        } else if (key == "slope_tolerance") {
            cfg.slope_tolerance = to_double(e.value, ctx);
        } else {
            throw unknown("analysis", key, e.line);
        }
    }

    for (const auto& [key, e] : raw["mms"]) {
        const std::string ctx = where("mms", key, e.line);
        if (indexed_key(key, "u_star", 1)) {
            us[indices_of(key)[0]] = e.value;
        } else if (key == "grids") {
            cfg.grids.clear();
            for (double g : parse_number_list(e.value)) {
                if (g != static_cast<int>(g)) throw ConfigError(ctx + "grids must be integers");
                cfg.grids.push_back(static_cast<int>(g));
            }
        } else if (key == "expected_order") {
            cfg.expected_order = to_double(e.value, ctx);
        } else if (key == "order_tolerance") {
            cfg.order_tolerance = to_double(e.value, ctx);
        } else {
            throw unknown("mms", key, e.line);
        }
    }
    cfg.u_star = dense(us, "u_star");

    for (const auto& [key, e] : raw["flags"]) {
        const std::string ctx = where("flags", key, e.line);
        if (key == "allow_degenerate_geometry") {
            cfg.allow_degenerate_geometry = to_bool(e.value, ctx);
        } else if (key == "lateral_closure") {
            if (e.value == "utilde")
                cfg.lateral_closure = LateralClosure::utilde;
            else if (e.value == "constant")
                cfg.lateral_closure = LateralClosure::constant;
            else
                throw ConfigError(ctx + "lateral_closure must be utilde or constant");
        } else {
            throw unknown("flags", key, e.line);
        }
    }

    const int N = cfg.kind == "laplace" ? 1 : cfg.kind == "lame" ? cfg.n : cfg.components;
    if (static_cast<int>(cfg.g_plus.size()) != N || static_cast<int>(cfg.g_minus.size()) != N)
        throw ConfigError("[data]: need g_plus_l and g_minus_l for l = 1.." + std::to_string(N));
    if (!cfg.u_star.empty() && static_cast<int>(cfg.u_star.size()) != N)
        throw ConfigError("[mms]: need u_star_l for l = 1.." + std::to_string(N));
    for (const auto& [key, expr] : cfg.coefficients) {
        const auto idx = indices_of(key);
        const bool component_ok = idx[0] <= N && idx[1] <= N;
        bool dir_ok = true;
        for (std::size_t q = 2; q < idx.size(); ++q) dir_ok = dir_ok && idx[q] <= cfg.n;
        if (!component_ok || !dir_ok) throw ConfigError("[operator] " + key + ": index out of range");
    }
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

GapProfile build_profile(const RunConfig& cfg)
{
    GapProfile p;
    p.h1 = parse_expression(cfg.h1, cfg.n - 1);
    p.h2 = parse_expression(cfg.h2, cfg.n - 1);
    p.kappa0 = cfg.kappa0;
    p.kappa1 = cfg.kappa1;
    return p;
}

NarrowRegion build_region(const RunConfig& cfg, double epsilon)
{
    return NarrowRegion(cfg.n, epsilon, build_profile(cfg), cfg.r_solve, cfg.r_analyze);
}

EllipticOperator build_operator(const RunConfig& cfg)
{
    EllipticOperator op = [&] {
        if (cfg.kind == "laplace") return make_laplace(cfg.n);
        if (cfg.kind == "lame") return make_lame(cfg.n, cfg.lame_lambda, cfg.lame_mu);
        EllipticOperator custom(cfg.n, cfg.components);
        for (const auto& [key, expr] : cfg.coefficients) {
            const auto idx = indices_of(key);
            Polynomial p = parse_expression(expr, cfg.n);
            switch (key[0]) {
            case 'A': custom.set_A(idx[0] - 1, idx[1] - 1, idx[2] - 1, idx[3] - 1, std::move(p)); break;
            case 'B': custom.set_B(idx[0] - 1, idx[1] - 1, idx[2] - 1, std::move(p)); break;
            case 'C': custom.set_C(idx[0] - 1, idx[1] - 1, idx[2] - 1, std::move(p)); break;
            default: custom.set_D(idx[0] - 1, idx[1] - 1, std::move(p)); break;
            }
        }
        return custom;
    }();
    if (cfg.lambda_claim) op.lambda_claim = *cfg.lambda_claim;
    if (cfg.Lambda_claim) op.Lambda_claim = *cfg.Lambda_claim;
    if (cfg.kappa2_claim) op.kappa2_claim = *cfg.kappa2_claim;
    return op;
}

BoundaryData build_data(const RunConfig& cfg)
{
    std::vector<Polynomial> gp, gm;
    for (const auto& s : cfg.g_plus) gp.push_back(parse_expression(s, cfg.n - 1));
    for (const auto& s : cfg.g_minus) gm.push_back(parse_expression(s, cfg.n - 1));
    return BoundaryData(std::move(gp), std::move(gm));
}

SolveOptions build_solve_options(const RunConfig& cfg)
{
    SolveOptions o;
    o.tol = cfg.tol;
    o.method = cfg.method;
    o.closure = cfg.lateral_closure;
    return o;
}

AnalysisOptions build_analysis_options(const RunConfig& cfg)
{
    AnalysisOptions o;
    o.R0 = cfg.R0;
    o.sup_region = cfg.sup_region;
    o.scenario = cfg.scenario;
    return o;
}

ProblemSpec build_problem(const RunConfig& cfg, double epsilon)
{
    return ProblemSpec{build_region(cfg, epsilon),
                       build_operator(cfg),
                       build_data(cfg),
                       cfg.nx,
                       cfg.nt,
                       build_solve_options(cfg),
                       build_analysis_options(cfg),
                       true};
}

} // namespace narrowgap
