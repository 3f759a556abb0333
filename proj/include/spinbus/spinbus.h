#ifndef SPINBUS_C_API_H
#define SPINBUS_C_API_H

/*
 * spinbus C API: config-driven experiment runner plus a handful of direct
 * scalar evaluators. All functions are thread-safe; results are returned
 * through opaque handles that must be released with sb_result_free.
 *
 * Status codes mirror the CLI exit codes:
 *   0 ok, 2 config/schema error, 3 numerical failure, 4 boundary-optimum
 *   warning (only when strict != 0).
 */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct sb_result sb_result;

typedef enum sb_status {
    SB_OK = 0,
    SB_ERR_SCHEMA = 2,
    SB_ERR_NUMERIC = 3,
    SB_WARN_BOUNDARY = 4
} sb_status;

/* Runs the experiment described by the JSON config, writing outputs into
 * out_dir. threads = 0 picks the hardware default. The returned handle is
 * valid regardless of status (it carries the error JSON on failure) and
 * must be freed by the caller; *out may be NULL only on allocation failure. */
sb_status sb_run_config(const char* config_json, const char* out_dir, int strict, int threads,
                        sb_result** out);

/* Schema validation only; no files written. */
sb_status sb_validate_config(const char* config_json, sb_result** out);

/* Summary JSON (or error JSON). Pointer owned by the handle. */
const char* sb_result_summary_json(const sb_result* r);
/* Empty string when the run succeeded. */
const char* sb_result_error(const sb_result* r);
sb_status sb_result_status(const sb_result* r);
void sb_result_free(sb_result* r);

const char* sb_version(void);

/* Direct evaluators (Hz, nm, Kelvin, seconds). */
double sb_dipolar_coupling_hz(double r_nm);
double sb_jt_relaxation_rate_per_s(double temperature_k);
double sb_chain_mode_energy_hz(int n, int k, double kappa_hz);
double sb_ss_budget_total(int n, double kappa_hz, double omega_i_hz, double delta_g_hz,
                          double t_ss_s, double t1_s);
double sb_ffst_budget_total(int n, double kappa_hz, double omega_n_hz, double omega_hz,
                            double delta_g_hz, double t1_s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SPINBUS_C_API_H */
