#include "spinbus/spinbus.h"

#include <limits>
#include <new>
#include <string>

#include "spinbus/budget.hpp"
#include "spinbus/core.hpp"
#include "spinbus/experiments.hpp"
#include "spinbus/hamiltonian.hpp"

struct sb_result {
    spinbus::RunResult inner;
};

extern "C" {

sb_status sb_run_config(const char* config_json, const char* out_dir, int strict, int threads,
                        sb_result** out) {
    if (out) *out = nullptr;
    if (!config_json || !out_dir || !out) return SB_ERR_SCHEMA;
    auto* r = new (std::nothrow) sb_result;
    if (!r) return SB_ERR_NUMERIC;
    try {
        r->inner = spinbus::run_config(config_json, out_dir, strict != 0, threads);
    } catch (const std::exception& e) {
        r->inner.status = spinbus::RunStatus::NumericalError;
        r->inner.error = e.what();
        r->inner.summary_json = std::string("{\"error\":\"") + e.what() + "\",\"code\":3}";
    }
    *out = r;
    return static_cast<sb_status>(r->inner.status);
}

sb_status sb_validate_config(const char* config_json, sb_result** out) {
    if (out) *out = nullptr;
    if (!config_json || !out) return SB_ERR_SCHEMA;
    auto* r = new (std::nothrow) sb_result;
    if (!r) return SB_ERR_NUMERIC;
    r->inner = spinbus::validate_config(config_json);
    *out = r;
    return static_cast<sb_status>(r->inner.status);
}

const char* sb_result_summary_json(const sb_result* r) {
    return r ? r->inner.summary_json.c_str() : "";
}

const char* sb_result_error(const sb_result* r) { return r ? r->inner.error.c_str() : ""; }

sb_status sb_result_status(const sb_result* r) {
    return r ? static_cast<sb_status>(r->inner.status) : SB_ERR_SCHEMA;
}

void sb_result_free(sb_result* r) { delete r; }

const char* sb_version(void) {
    static const std::string v = spinbus::tool_version();
    return v.c_str();
}

double sb_dipolar_coupling_hz(double r_nm) {
    try {
        return spinbus::dipolar_coupling(spinbus::PhysicalConstants{}, r_nm);
    } catch (...) {
        return -1.0;
    }
}

double sb_jt_relaxation_rate_per_s(double temperature_k) {
    try {
        return spinbus::jt_relaxation_rate(spinbus::PhysicalConstants{}, temperature_k);
    } catch (...) {
        return -1.0;
    }
}

double sb_chain_mode_energy_hz(int n, int k, double kappa_hz) {
    try {
        return spinbus::chain_mode_energy(n, k, kappa_hz);
    } catch (...) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

double sb_ss_budget_total(int n, double kappa_hz, double omega_i_hz, double delta_g_hz,
                          double t_ss_s, double t1_s) {
    try {
        spinbus::SSBudgetParams p;
        p.n = n;
        p.kappa_hz = kappa_hz;
        p.omega_i_hz = omega_i_hz;
        p.delta_g_hz = delta_g_hz;
        p.t_ss_s = t_ss_s;
        p.t1_s = t1_s;
        return spinbus::ss_budget(p).total;
    } catch (...) {
        return -1.0;
    }
}

double sb_ffst_budget_total(int n, double kappa_hz, double omega_n_hz, double omega_hz,
                            double delta_g_hz, double t1_s) {
    try {
        spinbus::FFSTBudgetParams p;
        p.n = n;
        p.kappa_hz = kappa_hz;
        p.omega_n_hz = omega_n_hz;
        p.omega_hz = omega_hz;
        p.delta_g_hz = delta_g_hz;
        p.t1_s = t1_s;
        return spinbus::ffst_budget(p).total;
    } catch (...) {
        return -1.0;
    }
}

} // extern "C"
