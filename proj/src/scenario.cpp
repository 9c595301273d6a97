#include "cvlambda/scenario.hpp"

#include "cvlambda/analytic.hpp"
#include "cvlambda/correlation.hpp"
#include "cvlambda/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace cvlambda {

using nlohmann::json;

namespace {

const std::vector<std::string> kParamKeys = {
    "gamma", "gamma1",  "gamma2",  "gamma12", "gamma_phi", "delta",   "delta_s",
    "delta_c", "alpha", "c1",      "c2",      "omega_in",  "ground_detuning"};

const std::vector<std::string> kCommands = {"propagate", "sweep", "optimize", "vortexmap",
                                            "analytic"};

void check_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError("'" + where + "' must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
    }
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError("'" + where + "." + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError("'" + where + "." + key + "' must be finite");
    return d;
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& where) {
    if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
    return get_number(obj, key, where);
}

std::size_t count_or(const json& obj, const std::string& key, std::size_t fallback,
                     const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 1)
        throw ConfigError("'" + where + "." + key + "' must be a positive integer");
    return v.get<std::size_t>();
}

bool bool_or(const json& obj, const std::string& key, bool fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_boolean()) throw ConfigError("'" + where + "." + key + "' must be a boolean");
    return obj.at(key).get<bool>();
}

std::vector<double> number_list(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw ConfigError("'" + where + "' must be a nonempty array");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError("'" + where + "' must contain only numbers");
        out.push_back(x.get<double>());
        if (!std::isfinite(out.back())) throw ConfigError("'" + where + "' must be finite");
    }
    return out;
}

cd parse_complex(const json& v, const std::string& where) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_object()) {
        check_keys(v, {"re", "im"}, where);
        if (!v.contains("re") || !v.contains("im"))
            throw ConfigError("'" + where + "' needs both 're' and 'im'");
        return {get_number(v, "re", where), get_number(v, "im", where)};
    }
    throw ConfigError("'" + where + "' must be a number or {re, im}");
}

json complex_json(cd z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

// JSON has no NaN; failed values become null.
json number_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

ModelParams parse_params(const json& p) {
    check_keys(p, kParamKeys, "params");
    if (!p.contains("alpha") || p.at("alpha").is_null())
        throw ConfigError("missing required key 'params.alpha'");
    ModelParams m;
    m.gamma = number_or(p, "gamma", 1.0, "params");
    m.gamma1 = number_or(p, "gamma1", 0.5 * m.gamma, "params");
    m.gamma2 = number_or(p, "gamma2", 0.5 * m.gamma, "params");
    m.gamma12 = number_or(p, "gamma12", 0.0, "params");
    m.gamma_phi = number_or(p, "gamma_phi", 0.0, "params");
    m.delta = number_or(p, "delta", 0.0, "params");
    if (p.contains("delta_s") && !p.at("delta_s").is_null())
        m.delta_s = get_number(p, "delta_s", "params");
    if (p.contains("delta_c") && !p.at("delta_c").is_null())
        m.delta_c = get_number(p, "delta_c", "params");
    m.alpha = get_number(p, "alpha", "params");
    if (p.contains("c1")) m.c1 = parse_complex(p.at("c1"), "params.c1");
    if (p.contains("c2")) m.c2 = parse_complex(p.at("c2"), "params.c2");
    if (p.contains("omega_in")) m.omega_in = parse_complex(p.at("omega_in"), "params.omega_in");
    if (p.contains("ground_detuning")) {
        const auto& g = p.at("ground_detuning");
        if (g == "two_photon") m.ground_detuning = GroundDetuning::two_photon;
        else if (g == "printed_control") m.ground_detuning = GroundDetuning::printed_control;
        else throw ConfigError("'params.ground_detuning' must be 'two_photon' or 'printed_control'");
    }
    try {
        m.validate();
    } catch (const InvalidParams& e) {
        throw ConfigError(std::string("invalid params: ") + e.what());
    }
    return m;
}

SweepAxis default_axis(Parameter name) {
    switch (name) {
        case Parameter::delta: return SweepAxis::logarithmic(name, 1e-4, 1e-1, 31);
        case Parameter::gamma12: return SweepAxis::logarithmic(name, 1e-4, 1e-1, 31);
        case Parameter::omega: return SweepAxis::linear(name, 0.02, 1.0, 50);
        case Parameter::alpha: return SweepAxis{name, {50.0, 100.0, 200.0}, Spacing::linear};
    }
    return {};
}

SweepAxis parse_axis(const json& a, const std::string& where, std::optional<Parameter> fixed_name) {
    check_keys(a, {"name", "spacing", "values", "min", "max", "count"}, where);
    Parameter name = Parameter::delta;
    if (fixed_name) {
        name = *fixed_name;
    } else {
        if (!a.contains("name") || !a.at("name").is_string())
            throw ConfigError("'" + where + ".name' is required");
        name = parameter_from_string(a.at("name").get<std::string>());
    }
    SweepAxis axis = default_axis(name);
    if (a.contains("spacing")) {
        if (!a.at("spacing").is_string()) throw ConfigError("'" + where + ".spacing' must be a string");
        axis.spacing = spacing_from_string(a.at("spacing").get<std::string>());
    }
    if (a.contains("values")) {
        if (a.contains("min") || a.contains("max") || a.contains("count"))
            throw ConfigError("'" + where + "' takes either 'values' or 'min'/'max'/'count'");
        axis.values = number_list(a.at("values"), where + ".values");
    } else if (a.contains("min") || a.contains("max") || a.contains("count")) {
        const double lo = number_or(a, "min", axis.values.front(), where);
        const double hi = number_or(a, "max", axis.values.back(), where);
        const std::size_t n = count_or(a, "count", axis.values.size(), where);
        axis = axis.spacing == Spacing::log ? SweepAxis::logarithmic(name, lo, hi, n)
                                            : SweepAxis::linear(name, lo, hi, n);
    }
    try {
        axis.validate();
    } catch (const InvalidParams& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return axis;
}

json axis_json(const SweepAxis& a) {
    return json{{"name", to_string(a.name)}, {"spacing", to_string(a.spacing)}, {"values", a.values}};
}

std::string mode_string(PropagationMode m) { return m == PropagationMode::full ? "full" : "stable"; }

PropagationMode parse_mode(const json& v) {
    if (v == "full") return PropagationMode::full;
    if (v == "stable") return PropagationMode::stable;
    throw ConfigError("'mode' must be 'full' or 'stable'");
}

OutputFormat parse_format(const json& v) {
    if (v == "csv") return OutputFormat::csv;
    if (v == "json") return OutputFormat::json;
    throw ConfigError("'format' must be 'csv' or 'json'");
}

std::string format_string(OutputFormat f) { return f == OutputFormat::json ? "json" : "csv"; }

// Resolved-parameter columns appended to every CSV row.
const std::vector<std::string> kParamColumns = {
    "gamma_over_Gamma",       "gamma1_over_Gamma",      "gamma2_over_Gamma",
    "gamma12_over_Gamma",     "gamma_phi_over_Gamma",   "delta_over_Gamma",
    "delta_s_over_Gamma",     "delta_c_over_Gamma",     "alpha",
    "omega_in_over_Gamma_re", "omega_in_over_Gamma_im", "c1_re",
    "c1_im",                  "c2_re",                  "c2_im"};

std::vector<double> param_row(const ModelParams& p) {
    return {p.gamma,          p.gamma1,         p.gamma2,       p.gamma12,     p.gamma_phi,
            p.delta,          p.detuning_s(),   p.detuning_c(), p.alpha,       p.omega_in.real(),
            p.omega_in.imag(), p.c1.real(),     p.c1.imag(),    p.c2.real(),   p.c2.imag()};
}

void append(std::vector<std::string>& cols, const std::vector<std::string>& more) {
    cols.insert(cols.end(), more.begin(), more.end());
}

void append(std::vector<double>& row, const std::vector<double>& more) {
    row.insert(row.end(), more.begin(), more.end());
}

json matrix_json(const Mat4& m) {
    json rows = json::array();
    for (int i = 0; i < 4; ++i) {
        json row = json::array();
        for (int j = 0; j < 4; ++j) row.push_back(complex_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

json entanglement_json(const EntanglementResult& e) {
    return json{{"v", e.v}, {"n_s", e.n_s}, {"n_c", e.n_c}, {"cross", complex_json(e.cross)},
                {"theta_opt", e.theta_opt}};
}

ScenarioResult run_propagate(const ScenarioConfig& c) {
    const auto& p = c.params;
    PropagationOptions opt;
    const auto states = propagate_correlations_sampled(p, c.xi_points, c.mode, opt);
    const auto b = beta_coefficients(p);
    const double in = std::norm(p.omega_in);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    ScenarioResult r;
    r.table.columns = {"xi",
                       "Ic_norm",
                       "Is_norm",
                       "omega_c_over_Gamma_re",
                       "omega_c_over_Gamma_im",
                       "omega_s_over_Gamma_re",
                       "omega_s_over_Gamma_im",
                       "V",
                       "n_s",
                       "n_c",
                       "cross_re",
                       "cross_im",
                       "theta_opt_rad",
                       "commutator_s",
                       "commutator_c"};
    append(r.table.columns, kParamColumns);
    json points = json::array();
    for (const auto& s : states) {
        const auto f = propagate_mean_field(p, s.xi);
        const auto e = dgcz_value(s);
        const double ic = in > 0.0 ? std::norm(f.omega_c) / in : nan;
        const double is = in > 0.0 ? std::norm(f.omega_s) / in : nan;
        std::vector<double> row = {s.xi,
                                   ic,
                                   is,
                                   f.omega_c.real(),
                                   f.omega_c.imag(),
                                   f.omega_s.real(),
                                   f.omega_s.imag(),
                                   e.v,
                                   e.n_s,
                                   e.n_c,
                                   e.cross.real(),
                                   e.cross.imag(),
                                   e.theta_opt,
                                   s.commutator_s(),
                                   s.commutator_c()};
        append(row, param_row(p));
        r.table.rows.push_back(std::move(row));
        points.push_back(json{{"xi", s.xi},
                              {"omega_c", complex_json(f.omega_c)},
                              {"omega_s", complex_json(f.omega_s)},
                              {"Ic_norm", number_json(ic)},
                              {"Is_norm", number_json(is)},
                              {"corr", matrix_json(s.corr)},
                              {"entanglement", entanglement_json(e)},
                              {"commutator_s", s.commutator_s()},
                              {"commutator_c", s.commutator_c()}});
    }
    r.result = json{{"beta1", complex_json(b.beta1)},
                    {"beta2", complex_json(b.beta2)},
                    {"w_const", complex_json(b.w_const)},
                    {"points", points}};
    return r;
}

json coords_json(const std::vector<SweepAxis>& axes, const GridPoint& g) {
    json coords = json::object();
    for (std::size_t k = 0; k < axes.size() && k < g.coords.size(); ++k)
        coords[to_string(axes[k].name)] = g.coords[k];
    return json{{"coords", coords}, {"value", number_json(g.value)}};
}

ModelParams apply_coords(ModelParams p, const std::vector<SweepAxis>& axes,
                         const std::vector<double>& c) {
    for (std::size_t k = 0; k < axes.size(); ++k) p = with_parameter(p, axes[k].name, c[k]);
    return p;
}

ScenarioResult run_sweep(const ScenarioConfig& c) {
    SweepOptions opt;
    opt.workers = c.workers;
    opt.refine = c.refine;
    const auto s = grid_sweep(c.axes, c.params, c.mode, opt);

    ScenarioResult r;
    r.table.columns = kParamColumns;
    r.table.columns.push_back("V");
    json table = json::array();
    for (std::size_t i = 0; i < s.v_table.size(); ++i) {
        auto row = param_row(apply_coords(c.params, s.axes, s.coords(i)));
        row.push_back(s.v_table[i]);
        r.table.rows.push_back(std::move(row));
        table.push_back(number_json(s.v_table[i]));
    }
    json axes = json::array();
    for (const auto& a : s.axes) axes.push_back(axis_json(a));
    json failures = json::array();
    for (const auto& f : s.failures) {
        json coords = json::object();
        for (std::size_t k = 0; k < s.axes.size(); ++k) coords[to_string(s.axes[k].name)] = f.coords[k];
        failures.push_back(json{{"index", f.index}, {"coords", coords}, {"kind", f.kind}, {"message", f.message}});
    }
    r.result = json{{"axes", axes},
                    {"shape", s.shape()},
                    {"v_table", table},
                    {"argmin", coords_json(s.axes, s.argmin)},
                    {"refined_min", coords_json(s.axes, s.refined_min)},
                    {"failures", failures}};
    return r;
}

ScenarioResult run_optimize(const ScenarioConfig& c) {
    OptimizeOptions opt;
    opt.workers = c.workers;
    opt.seeds_per_axis = c.seeds_per_axis;
    opt.refine_top = c.refine_top;
    const auto o = optimize_v(c.bounds, c.params, c.mode, opt);

    ScenarioResult r;
    r.table.columns = kParamColumns;
    append(r.table.columns, {"V", "best_seed_V", "evaluations"});
    auto row = param_row(o.params);
    append(row, {o.v, o.best_seed_value, double(o.evaluations)});
    r.table.rows.push_back(std::move(row));

    json x = json::object();
    for (std::size_t k = 0; k < c.bounds.size(); ++k) x[to_string(c.bounds[k].name)] = o.x[k];
    r.result = json{{"optimum", x},
                    {"v", o.v},
                    {"best_seed_value", o.best_seed_value},
                    {"evaluations", o.evaluations},
                    {"params", resolved_params_json(o.params)}};
    return r;
}

ScenarioResult run_vortexmap(const ScenarioConfig& c) {
    VortexMapOptions opt;
    opt.phi = c.phi;
    opt.mode = c.mode;
    opt.workers = c.workers;
    const auto rows = radial_entanglement_map(c.profile, c.params, c.radii, opt);
    const cd rotation = c.profile.charge * c.phi == 0.0 ? cd(1.0, 0.0)
                                                        : std::polar(1.0, c.profile.charge * c.phi);

    ScenarioResult r;
    r.table.columns = {"r_over_w", "omega_abs_over_Gamma", "Ic_exit_over_Gamma2", "Is_exit_over_Gamma2",
                       "V", "phase_rad"};
    append(r.table.columns, kParamColumns);
    json out = json::array();
    for (const auto& v : rows) {
        ModelParams local = c.params;
        local.omega_in = v.amplitude * rotation;
        std::vector<double> row = {v.r / c.profile.waist, v.amplitude, v.ic_exit, v.is_exit, v.v, v.phase};
        append(row, param_row(local));
        r.table.rows.push_back(std::move(row));
        json item{{"r", v.r},
                  {"amplitude", v.amplitude},
                  {"Ic_exit", number_json(v.ic_exit)},
                  {"Is_exit", number_json(v.is_exit)},
                  {"v", number_json(v.v)},
                  {"phase", v.phase}};
        if (!v.error.empty()) item["error"] = v.error;
        out.push_back(item);
    }
    r.result = json{{"rows", out}};
    return r;
}

ScenarioResult run_analytic(const ScenarioConfig& c) {
    ScenarioResult r;
    r.table.columns = kParamColumns;
    append(r.table.columns,
           {"lambda", "zeta", "eta", "nu", "nu_second_term", "nu_third_term", "radicand_clamped",
            "P1_re", "P1_im", "S1_re", "S1_im", "R2_re", "R2_im", "Q2_re", "Q2_im",
            "two_photon_estimate", "relaxation_estimate"});
    json out = json::array();
    for (double d : c.analytic_deltas) {
        const ModelParams p = with_parameter(c.params, Parameter::delta, d);
        const auto a = analytic_v(p);
        const auto est = coefficient_scaling_estimates(p, c.analytic_xi);
        auto row = param_row(p);
        append(row, {a.lambda, a.zeta, a.eta, a.nu, a.second_term, a.third_term,
                     a.radicand_clamped ? 1.0 : 0.0, a.p1.real(), a.p1.imag(), a.s1.real(),
                     a.s1.imag(), a.r2.real(), a.r2.imag(), a.q2.real(), a.q2.imag(),
                     est.two_photon_estimate, est.relaxation_estimate});
        r.table.rows.push_back(std::move(row));
        out.push_back(json{{"delta", d},
                           {"lambda", a.lambda},
                           {"zeta", a.zeta},
                           {"eta", a.eta},
                           {"nu", a.nu},
                           {"second_term", a.second_term},
                           {"third_term", a.third_term},
                           {"radicand_clamped", a.radicand_clamped},
                           {"p1", complex_json(a.p1)},
                           {"s1", complex_json(a.s1)},
                           {"r2", complex_json(a.r2)},
                           {"q2", complex_json(a.q2)},
                           {"two_photon_estimate", est.two_photon_estimate},
                           {"relaxation_estimate", est.relaxation_estimate}});
    }
    r.result = json{{"xi", c.analytic_xi}, {"rows", out}};
    return r;
}

}  // namespace

json params_to_json(const ModelParams& p) {
    return json{{"gamma", p.gamma},
                {"gamma1", p.gamma1},
                {"gamma2", p.gamma2},
                {"gamma12", p.gamma12},
                {"gamma_phi", p.gamma_phi},
                {"delta", p.delta},
                {"delta_s", p.delta_s ? json(*p.delta_s) : json(nullptr)},
                {"delta_c", p.delta_c ? json(*p.delta_c) : json(nullptr)},
                {"alpha", p.alpha},
                {"c1", complex_json(p.c1)},
                {"c2", complex_json(p.c2)},
                {"omega_in", complex_json(p.omega_in)},
                {"ground_detuning", p.ground_detuning == GroundDetuning::two_photon
                                        ? "two_photon"
                                        : "printed_control"}};
}

json resolved_params_json(const ModelParams& p) {
    json j = params_to_json(p);
    j["delta_s"] = p.detuning_s();
    j["delta_c"] = p.detuning_c();
    return j;
}

ScenarioConfig parse_config(const json& input) {
    const json& doc = input.contains("config") && input.contains("tool") ? input.at("config") : input;
    check_keys(doc,
               {"command", "mode", "format", "output", "workers", "params", "propagate", "sweep",
                "optimize", "vortexmap", "analytic"},
               "");
    ScenarioConfig c;
    if (!doc.contains("command") || !doc.at("command").is_string())
        throw ConfigError("missing required key 'command'");
    c.command = doc.at("command").get<std::string>();
    if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end())
        throw ConfigError("unknown command '" + c.command + "'");
    if (doc.contains("mode")) c.mode = parse_mode(doc.at("mode"));
    if (doc.contains("format")) c.format = parse_format(doc.at("format"));
    if (doc.contains("output")) {
        if (!doc.at("output").is_string()) throw ConfigError("'output' must be a string");
        c.output_path = doc.at("output").get<std::string>();
    }
    if (doc.contains("workers")) {
        const auto& w = doc.at("workers");
        if (!w.is_number_integer() || w.get<long long>() < 0)
            throw ConfigError("'workers' must be a nonnegative integer");
        c.workers = w.get<unsigned>();
    }
    if (!doc.contains("params")) throw ConfigError("missing required key 'params.alpha'");
    c.params = parse_params(doc.at("params"));

    for (const auto& cmd : kCommands) {
        if (cmd != c.command && doc.contains(cmd))
            throw ConfigError("block '" + cmd + "' does not apply to command '" + c.command + "'");
    }
    const json block = doc.contains(c.command) ? doc.at(c.command) : json::object();

    if (c.command == "propagate") {
        check_keys(block, {"xi_points", "samples"}, "propagate");
        if (block.contains("xi_points")) {
            c.xi_points = number_list(block.at("xi_points"), "propagate.xi_points");
        } else {
            const std::size_t n = count_or(block, "samples", 101, "propagate");
            c.xi_points = SweepAxis::linear(Parameter::delta, 0.0, 1.0, std::max<std::size_t>(n, 2)).values;
        }
        for (std::size_t i = 0; i < c.xi_points.size(); ++i) {
            const double x = c.xi_points[i];
            if (x < 0.0 || x > 1.0 || (i > 0 && x < c.xi_points[i - 1]))
                throw ConfigError("'propagate.xi_points' must be nondecreasing within [0, 1]");
        }
    } else if (c.command == "sweep") {
        check_keys(block, {"axes", "refine"}, "sweep");
        if (block.contains("axes")) {
            const auto& axes = block.at("axes");
            if (!axes.is_array() || axes.empty() || axes.size() > 3)
                throw ConfigError("'sweep.axes' must be an array of 1 to 3 axes");
            for (std::size_t k = 0; k < axes.size(); ++k)
                c.axes.push_back(parse_axis(axes[k], "sweep.axes[" + std::to_string(k) + "]", std::nullopt));
        } else {
            c.axes.push_back(default_axis(Parameter::delta));
        }
        c.refine = bool_or(block, "refine", true, "sweep");
    } else if (c.command == "optimize") {
        check_keys(block, {"bounds", "seeds_per_axis", "refine_top"}, "optimize");
        if (block.contains("bounds")) {
            const auto& bounds = block.at("bounds");
            if (!bounds.is_array() || bounds.empty())
                throw ConfigError("'optimize.bounds' must be a nonempty array");
            for (std::size_t k = 0; k < bounds.size(); ++k) {
                const std::string where = "optimize.bounds[" + std::to_string(k) + "]";
                const auto& b = bounds[k];
                check_keys(b, {"name", "lo", "hi", "log"}, where);
                if (!b.contains("name") || !b.at("name").is_string() || !b.contains("lo") || !b.contains("hi"))
                    throw ConfigError("'" + where + "' needs 'name', 'lo' and 'hi'");
                ParameterBound pb{parameter_from_string(b.at("name").get<std::string>()),
                                  get_number(b, "lo", where), get_number(b, "hi", where),
                                  bool_or(b, "log", true, where)};
                if (!(pb.hi >= pb.lo) || (pb.log && !(pb.lo > 0.0)))
                    throw ConfigError("'" + where + "' is not a valid interval");
                c.bounds.push_back(pb);
            }
        } else {
            c.bounds = {{Parameter::delta, 1e-4, 1e-1, true},
                        {Parameter::gamma12, 1e-4, 1e-1, true},
                        {Parameter::omega, 1e-2, 1.0, true}};
        }
        c.seeds_per_axis = count_or(block, "seeds_per_axis", 7, "optimize");
        c.refine_top = count_or(block, "refine_top", 3, "optimize");
    } else if (c.command == "vortexmap") {
        check_keys(block, {"epsilon", "waist", "charge", "phi", "radii", "r_max", "count"}, "vortexmap");
        c.profile.epsilon = number_or(block, "epsilon", std::abs(c.params.omega_in), "vortexmap");
        c.profile.waist = number_or(block, "waist", 1.0, "vortexmap");
        c.profile.charge = number_or(block, "charge", 1.0, "vortexmap");
        c.phi = number_or(block, "phi", 0.0, "vortexmap");
        try {
            c.profile.validate();
        } catch (const InvalidParams& e) {
            throw ConfigError(std::string("vortexmap: ") + e.what());
        }
        if (block.contains("radii")) {
            if (block.contains("r_max") || block.contains("count"))
                throw ConfigError("'vortexmap' takes either 'radii' or 'r_max'/'count'");
            c.radii = number_list(block.at("radii"), "vortexmap.radii");
        } else {
            const double r_max = number_or(block, "r_max", 2.0 * c.profile.waist, "vortexmap");
            const std::size_t n = count_or(block, "count", 41, "vortexmap");
            c.radii = SweepAxis::linear(Parameter::delta, 0.0, r_max, n).values;
        }
        for (double r : c.radii)
            if (r < 0.0) throw ConfigError("'vortexmap.radii' must be nonnegative");
    } else if (c.command == "analytic") {
        check_keys(block, {"deltas", "xi"}, "analytic");
        c.analytic_xi = number_or(block, "xi", 1.0, "analytic");
        if (block.contains("deltas")) {
            const auto& d = block.at("deltas");
            c.analytic_deltas = d.is_array() ? number_list(d, "analytic.deltas")
                                             : parse_axis(d, "analytic.deltas", Parameter::delta).values;
        } else {
            c.analytic_deltas = SweepAxis::logarithmic(Parameter::delta, 1e-6, 0.3, 61).values;
        }
    }
    return c;
}

json config_to_json(const ScenarioConfig& c) {
    json j{{"command", c.command},
           {"mode", mode_string(c.mode)},
           {"format", format_string(c.format)},
           {"output", c.output_path},
           {"workers", c.workers},
           {"params", params_to_json(c.params)}};
    if (c.command == "propagate") {
        j["propagate"] = json{{"xi_points", c.xi_points}};
    } else if (c.command == "sweep") {
        json axes = json::array();
        for (const auto& a : c.axes) axes.push_back(axis_json(a));
        j["sweep"] = json{{"axes", axes}, {"refine", c.refine}};
    } else if (c.command == "optimize") {
        json bounds = json::array();
        for (const auto& b : c.bounds)
            bounds.push_back(json{{"name", to_string(b.name)}, {"lo", b.lo}, {"hi", b.hi}, {"log", b.log}});
        j["optimize"] = json{{"bounds", bounds},
                             {"seeds_per_axis", c.seeds_per_axis},
                             {"refine_top", c.refine_top}};
    } else if (c.command == "vortexmap") {
        j["vortexmap"] = json{{"epsilon", c.profile.epsilon},
                              {"waist", c.profile.waist},
                              {"charge", c.profile.charge},
                              {"phi", c.phi},
                              {"radii", c.radii}};
    } else if (c.command == "analytic") {
        j["analytic"] = json{{"deltas", c.analytic_deltas}, {"xi", c.analytic_xi}};
    }
    return j;
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override '" + assignment + "' is not of the form key=value");
    std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    if (std::find(kParamKeys.begin(), kParamKeys.end(), key) != kParamKeys.end())
        key = "params." + key;

    json* node = &doc;
    if (node->contains("config") && node->contains("tool")) node = &(*node)["config"];
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot - start);
        if (part.empty()) throw ConfigError("override key '" + key + "' is malformed");
        if (!node->is_object()) throw ConfigError("override key '" + key + "' crosses a non-object");
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        if (node->is_null()) *node = json::object();
        start = dot + 1;
    }
}

ScenarioResult run_scenario(const ScenarioConfig& c) {
    if (c.command == "propagate") return run_propagate(c);
    if (c.command == "sweep") return run_sweep(c);
    if (c.command == "optimize") return run_optimize(c);
    if (c.command == "vortexmap") return run_vortexmap(c);
    if (c.command == "analytic") return run_analytic(c);
    throw ConfigError("unknown command '" + c.command + "'");
}

json metadata_document(const ScenarioConfig& c) {
    return json{{"tool", kToolName},
                {"version", kToolVersion},
                {"command", c.command},
                {"mode", mode_string(c.mode)},
                {"config", config_to_json(c)},
                {"resolved_params", resolved_params_json(c.params)},
                {"conventions",
                 {{"units", "rates, detunings and Rabi frequencies in units of Gamma; L = 1; g = 1"},
                  {"default_detunings", "delta_s = delta/2, delta_c = -delta/2 unless set"},
                  {"default_branch_rates", "gamma1 = gamma2 = gamma/2 unless set"},
                  {"default_gamma_phi", 0.0},
                  {"field_ordering", "a = (a_s, a_s^dagger, a_c, a_c^dagger)"},
                  {"entangled_when", "V < 4"}}}};
}

json output_document(const ScenarioConfig& c, const ScenarioResult& r) {
    json doc = metadata_document(c);
    doc["result"] = r.result;
    return doc;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "NaN";
    if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(std::ostream& os, const Table& t) {
    auto field = [](const std::string& s) {
        if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    };
    for (std::size_t k = 0; k < t.columns.size(); ++k) os << (k ? "," : "") << field(t.columns[k]);
    os << "\r\n";
    for (const auto& row : t.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << format_double(row[k]);
        os << "\r\n";
    }
}

std::vector<std::string> run_and_write(const ScenarioConfig& config) {
    ScenarioConfig c = config;
    if (c.output_path.empty())
        c.output_path = std::string(kToolName) + "_" + c.command + "." + format_string(c.format);
    const auto result = run_scenario(c);

    std::ofstream out(c.output_path, std::ios::binary);
    if (!out) throw IoError("cannot open output file '" + c.output_path + "'");
    if (c.format == OutputFormat::csv) write_csv(out, result.table);
    else out << output_document(c, result).dump(2) << '\n';
    if (!out) throw IoError("failed writing '" + c.output_path + "'");

    const std::string meta_path = c.output_path + ".meta.json";
    std::ofstream meta(meta_path, std::ios::binary);
    if (!meta) throw IoError("cannot open metadata file '" + meta_path + "'");
    json m = metadata_document(c);
    m["output"] = c.output_path;
    m["format"] = format_string(c.format);
    meta << m.dump(2) << '\n';
    if (!meta) throw IoError("failed writing '" + meta_path + "'");
    return {c.output_path, meta_path};
}

}  // namespace cvlambda
