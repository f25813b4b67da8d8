#include "narrowgap/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace narrowgap {

namespace {

Json opt(const std::optional<double>& v)
{
    return v ? Json(*v) : Json(nullptr);
}

const char* metric_name(Metric m)
{
    return m == Metric::center_grad ? "center_grad" : "sup_grad";
}

} // namespace

Json report_json(const BoundReport& r, const std::optional<RateFit>& fit)
{
    Json j;
    j["epsilon"] = r.epsilon;
    j["sup_grad"] = r.sup_grad;
    j["C_emp"] = r.C_emp;
    j["c_low"] = opt(r.c_low);
    j["energy_half"] = r.energy_half;
    j["F_delta0"] = r.F_delta0;
    j["lemma_constants"] = {{"k213", r.lemma.k213},
                            {"k219", r.lemma.k219},
                            {"k220", opt(r.lemma.k220)},
                            {"k225", opt(r.lemma.k225)},
                            {"k226", opt(r.lemma.k226)}};
    if (fit)
        j["rate_fit"] = {{"slope", fit->slope}, {"intercept", fit->intercept}, {"r2", fit->r2}};
    else
        j["rate_fit"] = {{"slope", nullptr}, {"intercept", nullptr}, {"r2", nullptr}};
    j["grid"] = {{"nx", r.nx}, {"nt", r.nt}};
    j["R0"] = r.R0;
    j["scenario"] = r.scenario;
    return j;
}

Json diagnostics_json(const BoundReport& r, std::uint64_t seed)
{
    Json j;
    j["epsilon"] = r.epsilon;
    j["center_grad"] = r.center_grad;
    j["sup_grad_shared"] = r.sup_grad_shared;
    j["normal_profile"] = opt(r.normal_profile);
    j["F_x0"] = opt(r.F_x0);
    j["x0_norm"] = r.x0_norm;
    j["u_l2"] = r.u_l2;
    j["w_l2"] = r.w_l2;
    j["seed"] = seed;
    return j;
}

Json rate_fit_json(const SweepResult& sweep)
{
    Json j;
    j["metric"] = metric_name(sweep.metric);
    j["slope"] = sweep.fit.slope;
    j["intercept"] = sweep.fit.intercept;
    j["r2"] = sweep.fit.r2;
    j["conclusive"] = sweep.fit.conclusive;
    Json members = Json::array();
    for (const auto& m : sweep.members) {
        members.push_back({{"epsilon", m.report.epsilon},
                           {"nx", m.report.nx},
                           {"nt", m.report.nt},
                           {"value", m.metric},
                           {"coarse_value", opt(m.coarse_metric)},
                           {"richardson_change", opt(m.richardson_change)},
                           {"richardson_ok", m.richardson_ok}});
    }
    j["members"] = members;
    j["richardson_ok"] = sweep.all_richardson_ok();
    return j;
}

Json convergence_json(const ConvergenceStudy& study)
{
    Json rows = Json::array();
    for (const auto& r : study.rows) {
        Json per = Json::array();
        for (const auto& o : r.order_per_component) per.push_back(opt(o));
        rows.push_back({{"grid", r.grid},
                        {"linf", r.linf},
                        {"l2", r.l2},
                        {"linf_per_component", r.linf_per_component},
                        {"order_linf", opt(r.order_linf)},
                        {"order_l2", opt(r.order_l2)},
                        {"order_per_component", per}});
    }
    return {{"rows", rows}, {"monotone", study.monotone}};
}

void write_field_csv(std::ostream& out, const SolutionField& u, const GradientField& grad)
{
    const MappedGrid& g = *u.grid;
    const int n = g.n();
    for (int a = 1; a < n; ++a) out << 'x' << a << ',';
    out << 'x' << n << ",t";
    for (int l = 1; l <= u.components; ++l) out << ",u_" << l;
    out << ",grad_norm\n";

    char buf[32];
    auto put = [&](double v, bool first = false) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        if (!first) out << ',';
        out << buf;
    };
    for (int node = 0; node < g.nodes(); ++node) {
        const int c = g.column_of(node);
        const int k = g.level_of(node);
        const Vec x = g.physical(c, k);
        for (int a = 0; a < n; ++a) put(x[a], a == 0);
        put(g.t(k));
        for (int l = 0; l < u.components; ++l) put(u.at(l, node));
        put(grad.norm(node));
        out << '\n';
    }
}

void write_json_file(const std::string& path, const Json& j)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

Json read_json_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    return Json::parse(in);
}

} // namespace narrowgap
