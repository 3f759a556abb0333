#include "spinbus/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "spinbus/budget.hpp"
#include "spinbus/planner.hpp"
#include "spinbus/protocols.hpp"

namespace spinbus {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.2.0";

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const std::set<std::string> kExperiments = {
    "register-gates", "adiabatic-swap", "sequential-swap", "ffst",     "remote-gate",
    "ss-budget",      "ffst-budget",    "optimize",        "contours", "freq-plan",
    "layout",         "yield",          "refocus-check"};

const std::set<std::string> kConstantKeys = {
    "zero_field_splitting", "electron_gyro",   "nuclear_gyro",   "nv_hyperfine",
    "n_hyperfine_par",      "n_hyperfine_perp", "jt_attempt_rate", "jt_activation_ev",
    "boltzmann_ev_per_k",   "dipolar_prefactor", "dipolar_angular", "b0_tesla",
    "gradient_t_per_m",     "row_pitch_nm",     "temperature_k"};

SystemSpec spec_from(const json& overrides) {
    SystemSpec spec;
    auto set = [&](const std::string& k, double v) {
        auto& c = spec.constants;
        if (k == "zero_field_splitting") c.zero_field_splitting = v;
        else if (k == "electron_gyro") c.electron_gyro = v;
        else if (k == "nuclear_gyro") c.nuclear_gyro = v;
        else if (k == "nv_hyperfine") c.nv_hyperfine = v;
        else if (k == "n_hyperfine_par") c.n_hyperfine_par = v;
        else if (k == "n_hyperfine_perp") c.n_hyperfine_perp = v;
        else if (k == "jt_attempt_rate") c.jt_attempt_rate = v;
        else if (k == "jt_activation_ev") c.jt_activation_ev = v;
        else if (k == "boltzmann_ev_per_k") c.boltzmann_ev_per_k = v;
        else if (k == "dipolar_prefactor") c.dipolar_prefactor = v;
        else if (k == "dipolar_angular") c.dipolar_angular = v;
        else if (k == "b0_tesla") spec.b0_tesla = v;
        else if (k == "gradient_t_per_m") spec.gradient_t_per_m = v;
        else if (k == "row_pitch_nm") spec.row_pitch_nm = v;
        else if (k == "temperature_k") spec.temperature_k = v;
    };
    for (auto it = overrides.begin(); it != overrides.end(); ++it) {
        if (!it.value().is_number()) throw SchemaError("constants values must be numeric");
        set(it.key(), it.value().get<double>());
    }
    return spec;
}

const std::map<std::string, std::set<std::string>> kParamKeys = {
    {"register-gates", {"rabi_hz"}},
    {"adiabatic-swap",
     {"kappa_hz", "kappa_t_ss", "omega_max_over_kappa", "delta_next_over_kappa", "shape"}},
    {"sequential-swap", {"n_chain", "kappa_hz", "kappa_t_ss", "omega_max_over_kappa", "mode"}},
    {"ffst", {"n", "kappa_hz", "g_over_kappa", "k", "round_trip", "duration_s", "omega_n_hz"}},
    {"remote-gate", {"n", "kappa_hz", "g_over_kappa", "k", "transfer", "middle_gate"}},
    {"ss-budget",
     {"n", "kappa_hz", "omega_i_hz", "delta_g_hz", "t_ss_s", "t1_s", "t2_s", "include_t2"}},
    {"ffst-budget", {"n", "kappa_hz", "omega_n_hz", "omega_hz", "delta_g_hz", "t1_s", "spacing"}},
    {"optimize", {"method", "n", "kappa_hz", "delta_g_hz", "t1_s"}},
    {"contours",
     {"method", "n", "kappa_hz", "delta_g_hz", "t1_min_s", "t1_max_s", "time_min_s", "time_max_s",
      "n_t1", "n_time"}},
    {"freq-plan", {"gradient_hz_per_row", "rows", "offsets"}},
    {"layout",
     {"h_nm", "w_nm", "plaquette_x_nm", "plaquette_y_nm", "link_min_nm", "link_max_nm"}},
    {"yield", {"p_conversion", "sites", "trials"}},
    {"refocus-check", {"n_sites", "kappa_hz", "segment_kappa_t", "trotter_steps", "dense_check"}},
};

void require_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw SchemaError("unknown key '" + it.key() + "' in " + where);
}

double num(const json& p, const std::string& key, double dflt) {
    if (!p.contains(key)) return dflt;
    if (!p[key].is_number()) throw SchemaError("parameter '" + key + "' must be numeric");
    return p[key].get<double>();
}

int inum(const json& p, const std::string& key, int dflt) {
    return static_cast<int>(num(p, key, dflt));
}

std::string str(const json& p, const std::string& key, const std::string& dflt) {
    if (!p.contains(key)) return dflt;
    if (!p[key].is_string()) throw SchemaError("parameter '" + key + "' must be a string");
    return p[key].get<std::string>();
}

json budget_to_json(const ErrorBudget& b) {
    json j;
    j["terms"] = b.terms;
    j["total"] = b.total;
    j["alternatives"] = b.alternatives;
    j["threshold_margin"] = threshold_margin(b);
    return j;
}

struct ExperimentOutput {
    json summary;
    std::string csv;  // empty when the experiment has no tabular payload
    bool boundary_warning = false;
};

ExperimentOutput run_one(const std::string& experiment, const json& p, std::uint64_t seed,
                         const SystemSpec& spec) {
    ExperimentOutput out;
    if (experiment == "register-gates") {
        const double rabi = num(p, "rabi_hz", 0.0);
        const auto cen = gate_ce_not_n(spec, rabi);
        const auto cne = gate_cn_not_e(spec, rabi);
        const auto swp = gate_register_swap(spec, rabi);
        out.summary["ce_not_n"] = json::parse(cen.to_json());
        out.summary["cn_not_e"] = json::parse(cne.to_json());
        out.summary["register_swap"] = json::parse(swp.to_json());
    } else if (experiment == "adiabatic-swap") {
        const double kappa = num(p, "kappa_hz", 8.7e3);
        const double kt = num(p, "kappa_t_ss", 20.0);
        const double om = num(p, "omega_max_over_kappa", 50.0);
        const std::string shape = str(p, "shape", "local_adiabatic");
        RampShape rs = RampShape::LocalAdiabatic;
        if (shape == "linear") rs = RampShape::Linear;
        else if (shape == "tanh") rs = RampShape::Tanh;
        else if (shape != "local_adiabatic") throw SchemaError("unknown ramp shape: " + shape);
        const auto ramp = optimal_ramp(kappa, kt / kappa, om * kappa, rs);
        std::optional<double> dn;
        if (p.contains("delta_next_over_kappa")) dn = num(p, "delta_next_over_kappa", 10.0) * kappa;
        const auto res = adiabatic_pair_swap(kappa, ramp, dn);
        out.summary = json::parse(res.report.to_json());
        out.summary["fidelity_avg"] = res.fidelity_avg;
        out.summary["branch_fidelity"] = res.branch_fidelity;
        out.summary["spectator_leakage"] = res.spectator_leakage;
    } else if (experiment == "sequential-swap") {
        const int n = inum(p, "n_chain", 3);
        const double kappa = num(p, "kappa_hz", 8.7e3);
        const double kt = num(p, "kappa_t_ss", 30.0);
        const double om = num(p, "omega_max_over_kappa", 100.0);
        const std::string mode = str(p, "mode", (1L << n) <= kDenseDimCap ? "dense" : "pairwise");
        if (mode != "dense" && mode != "pairwise") throw SchemaError("mode must be dense|pairwise");
        const auto ramp = optimal_ramp(kappa, kt / kappa, om * kappa);
        const auto rep = sequential_swap(ChainSpec::uniform(n, kappa), ramp,
                                         mode == "dense" ? SequentialMode::Dense
                                                         : SequentialMode::Pairwise);
        out.summary = json::parse(rep.to_json());
    } else if (experiment == "ffst") {
        const int n = inum(p, "n", 7);
        const double kappa = num(p, "kappa_hz", 12.6e3);
        const double g = num(p, "g_over_kappa", 0.05) * kappa;
        const int k = inum(p, "k", 0) > 0 ? inum(p, "k", 0) : ffst_fastest_mode(n);
        const bool rt = p.contains("round_trip") && p["round_trip"].get<bool>();
        const auto tuning = ffst_tune(n, kappa, k, g, num(p, "omega_n_hz", 0.0));
        const auto rep = ffst_transfer(tuning, num(p, "duration_s", 0.0),
                                       rt ? TransferTarget::RoundTrip : TransferTarget::ToFar);
        out.summary = json::parse(rep.to_json());
        out.summary["mode_margin_hz"] = tuning.mode_margin;
        out.summary["delta_hz"] = tuning.delta;
    } else if (experiment == "remote-gate") {
        const int n = inum(p, "n", 4);
        const double kappa = num(p, "kappa_hz", 12.6e3);
        const double g = num(p, "g_over_kappa", 0.05) * kappa;
        const int k = inum(p, "k", 0) > 0 ? inum(p, "k", 0) : ffst_fastest_mode(n);
        const std::string tk = str(p, "transfer", "ideal");
        const std::string mg = str(p, "middle_gate", "cp");
        if (tk != "ideal" && tk != "simulated") throw SchemaError("transfer must be ideal|simulated");
        if (mg != "cp" && mg != "noncommuting")
            throw SchemaError("middle_gate must be cp|noncommuting");
        const auto tuning = ffst_tune(n, kappa, k, g);
        const auto res = remote_gate_circuit(
            tuning, tk == "ideal" ? TransferKind::Ideal : TransferKind::Simulated,
            mg == "cp" ? MiddleGate::ControlledPhase : MiddleGate::NonCommuting);
        out.summary = json::parse(res.report.to_json());
        out.summary["chain_dependence"] = res.chain_dependence;
    } else if (experiment == "ss-budget") {
        SSBudgetParams b;
        b.n = inum(p, "n", b.n);
        b.kappa_hz = num(p, "kappa_hz", b.kappa_hz);
        b.omega_i_hz = num(p, "omega_i_hz", b.omega_i_hz);
        b.delta_g_hz = num(p, "delta_g_hz", b.delta_g_hz);
        b.t_ss_s = num(p, "t_ss_s", b.t_ss_s);
        b.t1_s = num(p, "t1_s", b.t1_s);
        b.t2_s = num(p, "t2_s", b.t2_s);
        b.include_t2 = p.contains("include_t2") && p["include_t2"].get<bool>();
        out.summary = budget_to_json(ss_budget(b));
    } else if (experiment == "ffst-budget") {
        FFSTBudgetParams b;
        b.n = inum(p, "n", b.n);
        b.kappa_hz = num(p, "kappa_hz", b.kappa_hz);
        b.omega_n_hz = num(p, "omega_n_hz", b.omega_n_hz);
        b.omega_hz = num(p, "omega_hz", b.omega_hz);
        b.delta_g_hz = num(p, "delta_g_hz", b.delta_g_hz);
        b.t1_s = num(p, "t1_s", b.t1_s);
        const std::string sp = str(p, "spacing", "band_center");
        if (sp == "kappa_over_n") b.spacing = ModeSpacing::KappaOverN;
        else if (sp != "band_center") throw SchemaError("spacing must be band_center|kappa_over_n");
        out.summary = budget_to_json(ffst_budget(b));
        out.summary["g_eff_hz"] = b.g_eff_hz();
        out.summary["t_ffst_s"] = b.t_ffst_s();
    } else if (experiment == "optimize") {
        const std::string method = str(p, "method", "SS");
        if (method == "SS") {
            const auto o = optimize_ss(inum(p, "n", 18), num(p, "kappa_hz", 8.7e3),
                                       num(p, "delta_g_hz", 10e6), num(p, "t1_s", 0.25));
            out.summary["omega_i_hz"] = o.omega_i_hz;
            out.summary["t_ss_s"] = o.t_ss_s;
            out.summary["n_t_ss_s"] = o.t_ss_s * inum(p, "n", 18);
            out.summary["budget"] = budget_to_json(o.budget);
            out.boundary_warning = o.boundary_warning;
        } else if (method == "FFST") {
            const auto o = optimize_ffst(inum(p, "n", 7), num(p, "kappa_hz", 12.6e3),
                                         num(p, "delta_g_hz", 10e6), num(p, "t1_s", 0.25));
            out.summary["omega_n_hz"] = o.omega_n_hz;
            out.summary["omega_hz"] = o.omega_hz;
            out.summary["t_ffst_s"] = o.t_ffst_s;
            out.summary["budget"] = budget_to_json(o.budget);
            out.boundary_warning = o.boundary_warning;
        } else {
            throw SchemaError("method must be SS|FFST");
        }
        out.summary["boundary_warning"] = out.boundary_warning;
    } else if (experiment == "contours") {
        const std::string method = str(p, "method", "FFST");
        if (method != "SS" && method != "FFST") throw SchemaError("method must be SS|FFST");
        const bool ss = method == "SS";
        const auto grid = contour_grid(
            ss ? BudgetMethod::SS : BudgetMethod::FFST, inum(p, "n", ss ? 18 : 7),
            num(p, "kappa_hz", ss ? 8.7e3 : 12.6e3), num(p, "delta_g_hz", 10e6),
            {num(p, "t1_min_s", 1e-3), num(p, "t1_max_s", 1.0)},
            {num(p, "time_min_s", 1e-4), num(p, "time_max_s", 1e-1)}, inum(p, "n_t1", 32),
            inum(p, "n_time", 64));
        out.csv = grid.to_csv();
        out.summary["method"] = method;
        out.summary["levels"] = grid.levels;
        json mins = json::array();
        for (size_t i = 0; i < grid.t1_axis.size(); ++i)
            mins.push_back(grid.min_over_time(static_cast<int>(i)));
        out.summary["min_over_time"] = mins;
        out.summary["t1_axis"] = grid.t1_axis;
    } else if (experiment == "freq-plan") {
        const double g = num(p, "gradient_hz_per_row", 150e6);
        const int rows = inum(p, "rows", 64);
        const std::string om = str(p, "offsets", "rounded");
        if (om != "rounded" && om != "exact") throw SchemaError("offsets must be rounded|exact");
        const auto plan = build_frequency_plan(
            g, rows, om == "rounded" ? OffsetsMode::Rounded : OffsetsMode::Exact,
            spec.constants);
        out.csv = plan.to_csv();
        out.summary["gradient_hz_per_row"] = plan.gradient_per_row_hz;
        out.summary["rows"] = plan.rows;
        out.summary["min_spacing_hz"] = plan.min_spacing_hz;
        out.summary["n_lines"] = plan.lines.size();
    } else if (experiment == "layout") {
        LayoutConfig c;
        c.h_nm = num(p, "h_nm", c.h_nm);
        c.w_nm = num(p, "w_nm", c.w_nm);
        c.plaquette_x_nm = num(p, "plaquette_x_nm", c.plaquette_x_nm);
        c.plaquette_y_nm = num(p, "plaquette_y_nm", c.plaquette_y_nm);
        c.link_min_nm = num(p, "link_min_nm", c.link_min_nm);
        c.link_max_nm = num(p, "link_max_nm", c.link_max_nm);
        const auto plan = generate_layout(c);
        out.csv = plan.to_csv();
        out.summary["links_ok"] = plan.links_ok;
        out.summary["violations"] = plan.violations;
        out.summary["diag_ab_nm"] = plan.diag_ab_nm;
        out.summary["diag_da_nm"] = plan.diag_da_nm;
        out.summary["impurities_per_horizontal_link"] = plan.impurities_per_horizontal_link;
        out.summary["impurities_per_vertical_link"] = plan.impurities_per_vertical_link;
        if (!plan.links_ok) throw std::runtime_error("layout geometry violates link tolerance");
    } else if (experiment == "yield") {
        const auto r = yield_monte_carlo(num(p, "p_conversion", 0.4), inum(p, "sites", 8),
                                         static_cast<long>(num(p, "trials", 1e5)), seed);
        out.summary["p_conversion"] = r.p_conversion;
        out.summary["sites_per_plaquette"] = r.sites_per_plaquette;
        out.summary["trials"] = r.trials;
        out.summary["functional_fraction"] = r.functional_fraction;
        out.summary["stderr"] = r.stderr_mc;
        out.summary["closed_form"] = r.closed_form;
        out.summary["failure_probability"] = r.failure_probability;
        out.summary["nominal_claim_met"] = r.nominal_claim_met;
        out.summary["seed"] = r.seed;
    } else if (experiment == "refocus-check") {
        const int n = inum(p, "n_sites", 8);
        const double kappa = num(p, "kappa_hz", 1.0);
        const double seg = num(p, "segment_kappa_t", 0.025) / kappa;
        const int steps = inum(p, "trotter_steps", 8);
        const auto plan = echo_schedule_nnn(sawtooth_rows(n), seg, steps);
        json checks = json::array();
        bool all = true;
        for (const auto& c : plan.nnn_checks) {
            checks.push_back({{"term", c.term}, {"refocused", c.refocused}});
            all = all && c.refocused;
        }
        out.summary["nnn_checks"] = checks;
        out.summary["all_nnn_refocused"] = all;
        out.summary["surviving_eff1"] = plan.surviving_eff1;
        out.summary["surviving_eff2"] = plan.surviving_eff2;
        out.summary["total_time_s"] = plan.composed.total_time;
        out.summary["effective_time_s"] = plan.effective_time;
        out.summary["n_events"] = plan.composed.events.size();
        if (p.contains("dense_check") && p["dense_check"].get<bool>()) {
            if (n > 10) throw std::runtime_error("dense_check limited to n_sites <= 10");
            auto l = HilbertLayout::spin_half_chain(n);
            const MatrixXc sp_ = spin_half_sp(), sm_ = spin_half_sm();
            MatrixXc h_nn = MatrixXc::Zero(l.total_dim, l.total_dim);
            MatrixXc h_full = h_nn;
            for (const auto& gc : sawtooth_couplings(n, LayoutConfig{}, kappa)) {
                const MatrixXc term =
                    embed2(l, gc.i, sp_, gc.j, sm_) + embed2(l, gc.i, sm_, gc.j, sp_);
                if (gc.j - gc.i == 1) h_nn += gc.kappa_hz * term;
                h_full += gc.kappa_hz * term;
            }
            HamiltonianModel full, ideal;
            full.layout = ideal.layout = l;
            full.static_part = h_full;
            ideal.static_part = h_nn;
            const MatrixXc u = echo_propagator(full, plan.composed);
            const MatrixXc ui = propagator_dense(ideal, plan.effective_time);
            const Complex tr = (ui.adjoint() * u).trace();
            out.summary["dense_check_error"] =
                (u * std::polar(1.0, -std::arg(tr)) - ui).cwiseAbs().maxCoeff();
        }
    } else {
        throw SchemaError("unknown experiment: " + experiment);
    }
    return out;
}

// ---- sweep machinery ----

struct SweepAxis {
    std::string key;
    std::vector<json> values;
};

std::vector<SweepAxis> parse_sweep(const json& sw) {
    if (!sw.is_array()) throw SchemaError("sweep must be an array of axis specs");
    if (sw.size() > 3) throw SchemaError("sweep supports at most 3 axes");
    std::vector<SweepAxis> axes;
    for (const auto& a : sw) {
        require_keys(a, {"key", "values", "start", "stop", "num", "log"}, "sweep axis");
        SweepAxis ax;
        if (!a.contains("key")) throw SchemaError("sweep axis missing 'key'");
        ax.key = a["key"].get<std::string>();
        if (a.contains("values")) {
            for (const auto& v : a["values"]) ax.values.push_back(v);
        } else {
            const double start = a.at("start").get<double>();
            const double stop = a.at("stop").get<double>();
            const int nn = a.at("num").get<int>();
            const bool lg = a.contains("log") && a["log"].get<bool>();
            if (nn < 1 || nn > 4096) throw SchemaError("sweep axis num out of range");
            for (int i = 0; i < nn; ++i) {
                const double f = nn == 1 ? 0.0 : static_cast<double>(i) / (nn - 1);
                ax.values.push_back(lg ? std::exp(std::log(start) +
                                                  (std::log(stop) - std::log(start)) * f)
                                       : start + (stop - start) * f);
            }
        }
        if (ax.values.empty()) throw SchemaError("sweep axis has no values");
        axes.push_back(std::move(ax));
    }
    return axes;
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, double>>& out) {
    if (j.is_number()) {
        out.emplace_back(prefix, j.get<double>());
    } else if (j.is_boolean()) {
        out.emplace_back(prefix, j.get<bool>() ? 1.0 : 0.0);
    } else if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        f << content;
    }
    std::filesystem::rename(tmp, path);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

std::string tool_version() { return kVersion; }

RunResult validate_config(const std::string& config_json) {
    RunResult r;
    try {
        const json cfg = json::parse(config_json);
        require_keys(cfg,
                     {"version", "experiment", "seed", "parameters", "sweep", "constants",
                      "output_dir"},
                     "config");
        if (cfg.contains("constants")) require_keys(cfg["constants"], kConstantKeys, "constants");
        if (cfg.contains("output_dir") && !cfg["output_dir"].is_string())
            throw SchemaError("output_dir must be a string");
        if (cfg.contains("version") && cfg["version"].get<int>() != 1)
            throw SchemaError("unsupported config version");
        if (!cfg.contains("experiment")) throw SchemaError("config missing 'experiment'");
        const std::string exp = cfg["experiment"].get<std::string>();
        if (!kExperiments.count(exp)) throw SchemaError("unknown experiment: " + exp);
        const json params = cfg.contains("parameters") ? cfg["parameters"] : json::object();
        require_keys(params, kParamKeys.at(exp), "parameters");
        if (cfg.contains("sweep")) {
            const auto axes = parse_sweep(cfg["sweep"]);
            for (const auto& ax : axes)
                if (!kParamKeys.at(exp).count(ax.key))
                    throw SchemaError("sweep key '" + ax.key + "' not a parameter of " + exp);
        }
    } catch (const SchemaError& e) {
        r.status = RunStatus::SchemaError;
        r.error = e.what();
    } catch (const json::exception& e) {
        r.status = RunStatus::SchemaError;
        r.error = e.what();
    }
    if (r.status != RunStatus::Ok) {
        json err;
        err["error"] = r.error;
        err["code"] = static_cast<int>(r.status);
        r.summary_json = err.dump(2);
    }
    return r;
}

RunResult run_config(const std::string& config_json, const std::filesystem::path& out_dir,
                     bool strict, int threads) {
    const auto t0 = std::chrono::steady_clock::now();
    RunResult check = validate_config(config_json);
    if (check.status != RunStatus::Ok) return check;

    RunResult r;
    json cfg = json::parse(config_json);
    const std::string experiment = cfg["experiment"].get<std::string>();
    const std::uint64_t seed = cfg.contains("seed") ? cfg["seed"].get<std::uint64_t>() : 1;
    const json params = cfg.contains("parameters") ? cfg["parameters"] : json::object();
    const SystemSpec spec =
        spec_from(cfg.contains("constants") ? cfg["constants"] : json::object());

    try {
        std::filesystem::create_directories(out_dir);
        json resolved = cfg;
        resolved["version"] = 1;
        resolved["seed"] = seed;
        resolved["tool_version"] = kVersion;
        atomic_write(out_dir / "resolved_config.json", resolved.dump(2) + "\n");

        std::vector<std::string> outputs = {"resolved_config.json"};
        json summary;
        std::string csv;
        bool boundary = false;

        if (!cfg.contains("sweep")) {
            auto out = run_one(experiment, params, seed, spec);
            summary = std::move(out.summary);
            csv = std::move(out.csv);
            boundary = out.boundary_warning;
        } else {
            const auto axes = parse_sweep(cfg["sweep"]);
            std::vector<std::vector<json>> cells;  // parameter overrides per cell
            std::vector<json> current(axes.size());
            std::function<void(size_t)> rec = [&](size_t depth) {
                if (depth == axes.size()) {
                    cells.push_back(current);
                    return;
                }
                for (const auto& v : axes[depth].values) {
                    current[depth] = v;
                    rec(depth + 1);
                }
            };
            rec(0);
            std::vector<json> results(cells.size());
            std::vector<bool> warns(cells.size(), false);
            const int nthreads =
                threads > 0 ? threads
                            : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
            std::atomic<size_t> next{0};
            auto worker = [&]() {
                for (;;) {
                    const size_t i = next.fetch_add(1);
                    if (i >= cells.size()) break;
                    json cell_params = params;
                    for (size_t a = 0; a < axes.size(); ++a) cell_params[axes[a].key] = cells[i][a];
                    auto out = run_one(experiment, cell_params, seed, spec);
                    results[i] = std::move(out.summary);
                    warns[i] = out.boundary_warning;
                }
            };
            std::vector<std::thread> pool;
            for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
            for (auto& t : pool) t.join();

            // merged CSV: sweep coordinates + flattened numeric summary
            std::ostringstream os;
            os.precision(12);
            std::vector<std::pair<std::string, double>> head;
            flatten(results[0], "", head);
            for (const auto& ax : axes) os << ax.key << ',';
            for (size_t c = 0; c < head.size(); ++c)
                os << head[c].first << (c + 1 == head.size() ? '\n' : ',');
            for (size_t i = 0; i < cells.size(); ++i) {
                for (size_t a = 0; a < axes.size(); ++a) os << cells[i][a].dump() << ',';
                std::vector<std::pair<std::string, double>> row;
                flatten(results[i], "", row);
                for (size_t c = 0; c < row.size(); ++c)
                    os << row[c].second << (c + 1 == row.size() ? '\n' : ',');
                boundary = boundary || warns[i];
            }
            csv = os.str();
            summary["cells"] = results.size();
            summary["axes"] = json::array();
            for (const auto& ax : axes) summary["axes"].push_back(ax.key);
            summary["results"] = results;
        }

        if (!csv.empty()) {
            atomic_write(out_dir / "data.csv", csv);
            outputs.push_back("data.csv");
        }
        r.boundary_warning = boundary;
        summary["boundary_warning"] = boundary;
        r.summary_json = summary.dump(2);
        atomic_write(out_dir / "summary.json", r.summary_json + "\n");
        outputs.push_back("summary.json");

        json manifest;
        manifest["config_hash"] = fnv1a(resolved.dump());
        manifest["tool_version"] = kVersion;
        manifest["wall_time_s"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        manifest["outputs"] = outputs;
        atomic_write(out_dir / "manifest.json", manifest.dump(2) + "\n");

        if (strict && boundary) r.status = RunStatus::BoundaryWarning;
    } catch (const SchemaError& e) {
        r.status = RunStatus::SchemaError;
        r.error = e.what();
    } catch (const std::exception& e) {
        r.status = RunStatus::NumericalError;
        r.error = e.what();
    }
    if (!r.error.empty()) {
        json err;
        err["error"] = r.error;
        err["code"] = static_cast<int>(r.status);
        r.summary_json = err.dump(2);
    }
    return r;
}

} // namespace spinbus
