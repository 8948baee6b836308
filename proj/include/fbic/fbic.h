/*
 * C interface to the freezable bound-state-in-the-continuum library.
 * All functions return fbic_status; fbic_last_error() holds the message of
 * the most recent failure on the calling thread.
 */
#ifndef FBIC_H
#define FBIC_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct fbic_scenario fbic_scenario;

typedef enum {
    FBIC_OK = 0,
    FBIC_VERIFY_FAILED = 1,
    FBIC_INVALID_CONFIG = 2,
    FBIC_NUMERIC_ERROR = 3,
    FBIC_BAD_ARGUMENT = 4
} fbic_status;

const char* fbic_last_error(void);

/* Parse a JSON scenario configuration and assemble the pipeline (builds the
 * transformation chain; seeds are validated here). */
fbic_status fbic_scenario_parse(const char* json_text, fbic_scenario** out);
void fbic_scenario_free(fbic_scenario* sc);

/* Canonical JSON of the parsed config; free with fbic_string_free. */
fbic_status fbic_scenario_canonical_json(const fbic_scenario* sc, char** out);
/* sha256 hex digest of the canonical config; out must hold 65 chars. */
fbic_status fbic_scenario_config_hash(const fbic_scenario* sc, char* out65);
void fbic_string_free(char* s);

size_t fbic_num_steps(const fbic_scenario* sc);

/* Export lattice: the propagation grid over [0, x_max]. */
fbic_status fbic_grid_size(const fbic_scenario* sc, size_t* n);
fbic_status fbic_grid_nodes(const fbic_scenario* sc, double* xs, size_t n);

/* Frozen potential V_F(., t) on the export lattice (reversed scenarios run
 * their display time from the flat freeze slice backwards). */
fbic_status fbic_potential_slice(const fbic_scenario* sc, double t, double* out, size_t n);
/* |phi_F|^2 of the bound state tied to chain step `step` (0-based). */
fbic_status fbic_bound_density_slice(const fbic_scenario* sc, size_t step, double t, double* out, size_t n);
/* |phi_F|^2 of the scattering state at energy e. */
fbic_status fbic_scattering_density_slice(const fbic_scenario* sc, double e, double t, double* out, size_t n);

typedef enum {
    FBIC_RUN_FROZEN_GAUGE_REMOVED = 0, /* exp(-ig) phi(., t_F) under the frozen potential */
    FBIC_RUN_FROZEN_RAW = 1,           /* raw phi(., t_F) under the frozen potential */
    FBIC_RUN_FROZEN_SCATTERING = 2,    /* raw scattering slice under the frozen potential */
    FBIC_RUN_PREFREEZE_AGREEMENT = 3   /* CN vs analytic transport on [0, t_F] */
} fbic_run_kind;

typedef struct {
    double drift_or_error; /* density drift, or windowed state error for the pre-freeze run */
    double max_leak;
    double norm_drift_rel;
} fbic_run_report;

/* Crank-Nicolson run; `energy` selects the scattering energy for
 * FBIC_RUN_FROZEN_SCATTERING (ignored otherwise). Optional density snapshots
 * at `times` (offsets from t_F) are written row-major into `densities`
 * (n_times x n), both may be NULL. */
fbic_status fbic_evolve_run(const fbic_scenario* sc, fbic_run_kind kind, double energy, const double* times,
                            size_t n_times, double* densities, size_t n, fbic_run_report* report);

typedef struct {
    char name[64];
    double measured;
    double threshold;
    int less_than; /* 1: pass when measured < threshold; 0: measured > threshold */
    int pass;
} fbic_check;

/* Run the verification battery. Pass checks = NULL to query the count. When
 * every check passes the status is FBIC_OK, otherwise FBIC_VERIFY_FAILED
 * (results are still written). */
fbic_status fbic_verify(const fbic_scenario* sc, int include_propagation, fbic_check* checks, size_t cap,
                        size_t* n_out);
/* Same battery as a JSON report; free with fbic_string_free. */
fbic_status fbic_verify_json(const fbic_scenario* sc, int include_propagation, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* FBIC_H */
