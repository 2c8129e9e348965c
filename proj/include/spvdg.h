/* C interface to the PV microgrid simulation toolkit.
 *
 * All functions return SPVDG_OK (0) on success or a negative error code; the
 * thread-local message from spvdg_last_error() describes the failure. Handles
 * are opaque and freed with their matching *_free call.
 */
#ifndef SPVDG_H
#define SPVDG_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
  SPVDG_OK = 0,
  SPVDG_ERR_NO_BRACKET = -1,
  SPVDG_ERR_OFF_CURVE = -2,
  SPVDG_ERR_SINGULAR_JACOBIAN = -3,
  SPVDG_ERR_NO_CONVERGENCE = -4,
  SPVDG_ERR_INFEASIBLE_OPERATING_POINT = -5,
  SPVDG_ERR_INFEASIBLE_REFERENCES = -6,
  SPVDG_ERR_DEGENERATE_DENOMINATOR = -7,
  SPVDG_ERR_NON_FINITE = -8,
  SPVDG_ERR_NEVER_SETTLES = -9,
  SPVDG_ERR_BAD_CONFIG = -10,
  SPVDG_ERR_IO = -11,
  SPVDG_ERR_INVALID_ARGUMENT = -12,
};

/* Message for the most recent failure on this thread ("" if none). */
const char* spvdg_last_error(void);

typedef struct spvdg_scenario spvdg_scenario;
typedef struct spvdg_trace spvdg_trace;

/* Newline-separated "name\tdescription" listing of the built-in presets.
 * Writes up to cap bytes (NUL-terminated); *needed gets the full length. */
int spvdg_list_scenarios(char* buf, size_t cap, size_t* needed);

/* Resolves a built-in preset name, or, if the name matches no preset, parses
 * the path as a config file. */
int spvdg_scenario_open(const char* name_or_path, spvdg_scenario** out);
void spvdg_scenario_free(spvdg_scenario* scenario);

/* Applies one "key" / "value" override (same key space as config files). */
int spvdg_scenario_set(spvdg_scenario* scenario, const char* key,
                       const char* value);

/* Canonical key=value serialization of the resolved scenario. */
int spvdg_scenario_serialize(const spvdg_scenario* scenario, char* buf,
                             size_t cap, size_t* needed);

/* 16-hex-digit deterministic hash of the resolved configuration. */
int spvdg_scenario_hash(const spvdg_scenario* scenario, char buf[17]);

/* Runs the scenario and returns the trace (empty for ch2-estimate, which has
 * no time-domain component). */
int spvdg_scenario_run(const spvdg_scenario* scenario, spvdg_trace** out);

/* Runs the scenario and writes trace.csv, metrics.txt and manifest.txt into
 * out_dir (which must exist). overrides, if given, are "key=value" strings
 * recorded in the manifest and applied before the run. */
int spvdg_run_files(const char* name_or_path, const char* const* overrides,
                    size_t n_overrides, const char* out_dir);

/* Trace access. Each row has 18 columns in CSV order: t, x1..x6, u1, u2,
 * d1, d2, d3, d1hat, d2hat, d3hat, P_pv, P_batt, P_load (observer columns are
 * 0 when has_observer is 0). */
int spvdg_trace_size(const spvdg_trace* trace, size_t* rows, int* has_observer);
int spvdg_trace_row(const spvdg_trace* trace, size_t index, double cols[18]);
void spvdg_trace_free(spvdg_trace* trace);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SPVDG_H */
