/* C interface to the swapqoc core: opaque config handles, error codes, and
 * the command runner the CLI is built on. */
#ifndef SWAPQOC_CAPI_H
#define SWAPQOC_CAPI_H

#ifdef __cplusplus
extern "C" {
#endif

typedef struct swq_config swq_config;

enum swq_status {
  SWQ_OK = 0,
  SWQ_ERR_INVALID = 1, /* bad argument or config value */
  SWQ_ERR_IO = 2,      /* missing or unreadable file */
  SWQ_ERR_RUNTIME = 3  /* numerical or internal failure */
};

const char* swq_version(void);

/* Message for the last failing call on this thread ("" if none). */
const char* swq_last_error(void);

/* Config handles start from the built-in defaults. */
swq_config* swq_config_create(void);
int swq_config_load(swq_config* config, const char* path);
int swq_config_set(swq_config* config, const char* key, const char* value);
void swq_config_free(swq_config* config);

/* Run a CLI command; argv excludes the program name. Returns the process
 * exit code (not a swq_status). */
int swq_run(int argc, const char* const* argv);

/* Lowest `count` single-particle energies in kHz at the given scaled
 * controls; `out_khz` must hold `count` doubles. */
int swq_eigen_energies(const swq_config* config, double beta, double theta,
                       double v0, int count, double* out_khz);

/* Evaluate a control CSV for "merge" or "full_gate"; writes
 * {F, F', alpha} into out[3]. */
int swq_evaluate_control(const swq_config* config, const char* control_csv,
                         const char* problem, double out[3]);

#ifdef __cplusplus
}
#endif

#endif
