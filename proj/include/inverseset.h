/* C API for the inverseset shared library.
 *
 * All functions return IVS_OK on success; on failure they return an
 * error code and leave a human-readable message in ivs_last_error()
 * (thread-local). Handles are opaque and freed with the matching
 * *_free function. Models and problems are immutable once built and
 * may be used from several threads concurrently.
 */
#ifndef INVERSESET_H
#define INVERSESET_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ivs_status {
  IVS_OK = 0,
  IVS_ERR_DIMENSION_MISMATCH = 1,
  IVS_ERR_NONFINITE_INPUT = 2,
  IVS_ERR_NONFINITE_VALUE = 3,
  IVS_ERR_SCHEMA_VIOLATION = 4,
  IVS_ERR_UNSUPPORTED_KIND = 5,
  IVS_ERR_DEGENERATE_BAND = 6,
  IVS_ERR_BAND_OUTSIDE_LOGISTIC_RANGE = 7,
  IVS_ERR_MAX_OUTER_ITERATIONS = 8,
  IVS_ERR_WALK_BUDGET_EXHAUSTED = 9,
  IVS_ERR_CONFIG_INVALID = 10,
  IVS_ERR_MODEL_LOAD = 11,
  IVS_ERR_FINGERPRINT_MISMATCH = 12,
  IVS_ERR_UNSUPPORTED_DIMENSION = 13,
  IVS_ERR_EMPTY_SET = 14,
  IVS_ERR_TOO_FEW_SAMPLES = 15,
  IVS_ERR_MISSING_ARTIFACTS = 16,
  IVS_ERR_IO = 17,
  IVS_ERR_INVALID_ARGUMENT = 18,
  IVS_ERR_UNKNOWN = 19
} ivs_status;

typedef struct ivs_model ivs_model;
typedef struct ivs_problem ivs_problem;
typedef struct ivs_sampleset ivs_sampleset;

const char* ivs_version(void);
const char* ivs_status_name(ivs_status status);
/* Message from the most recent failing call on this thread. */
const char* ivs_last_error(void);
/* Process exit code convention: 0 ok, 2 budget exhaustion, 1 otherwise. */
int ivs_exit_code(ivs_status status);

/* ---- models ---------------------------------------------------------- */

ivs_status ivs_model_load(const char* path, ivs_model** out);
ivs_status ivs_model_save(const ivs_model* model, const char* path);
void ivs_model_free(ivs_model* model);

size_t ivs_model_input_dim(const ivs_model* model);
size_t ivs_model_output_dim(const ivs_model* model);
const char* ivs_model_kind(const ivs_model* model);

ivs_status ivs_model_forward(const ivs_model* model, const double* x,
                             size_t x_len, double* y, size_t y_len);
/* out receives u'J(x); out_len must equal the input dimension. */
ivs_status ivs_model_vjp(const ivs_model* model, const double* x, size_t x_len,
                         const double* u, size_t u_len, double* out,
                         size_t out_len);
ivs_status ivs_model_compose(const ivs_model* outer, const ivs_model* inner,
                             ivs_model** out);

typedef struct ivs_grad_check_report {
  double max_rel_error;
  size_t worst_coordinate;
  double step_size;
  int nondifferentiable; /* a rectifier kink lies within h of the probe */
} ivs_grad_check_report;

ivs_status ivs_model_grad_check(const ivs_model* model, const double* x,
                                size_t x_len, double h, double tol,
                                ivs_grad_check_report* out);

/* ---- problems -------------------------------------------------------- */

/* feasibility_mode: "paper_one_sided" or "strict_two_sided". The models
 * are copied by reference; the caller may free its handles at any time. */
ivs_status ivs_problem_create(const ivs_model* generator,
                              const ivs_model* encoder,
                              const char* feasibility_mode, ivs_problem** out);
ivs_status ivs_problem_add_constraint(ivs_problem* problem, const ivs_model* f,
                                      double z1, double z2);
void ivs_problem_free(ivs_problem* problem);

/* per_constraint (length p) and activations (length p) may be NULL. */
ivs_status ivs_problem_feasible(const ivs_problem* problem, const double* code,
                                size_t code_len, int* per_constraint,
                                double* activations, int* all_feasible);

/* ---- sampling runs --------------------------------------------------- */

typedef struct ivs_run_params {
  size_t n;
  size_t K;
  uint64_t rng_seed;
  double init_radius;
  int shared_init; /* start every code from one random vector */
  double beta;     /* walk step length */
  long max_walk_steps; /* <= 0 selects the default budget */
  double mu0;
  double alpha;
  int inner_steps;
  int max_outer_iters;
  double seed_step_beta;
  int multiplier_residual_with_slack;
  int diversity; /* 0 encoded, 1 code_space, 2 none */
} ivs_run_params;

void ivs_run_params_init(ivs_run_params* params);

ivs_status ivs_sample(const ivs_problem* problem, const ivs_run_params* params,
                      ivs_sampleset** out);
ivs_status ivs_full_batch(const ivs_problem* problem,
                          const ivs_run_params* params, ivs_sampleset** out);

size_t ivs_sampleset_count(const ivs_sampleset* set);
size_t ivs_sampleset_code_dim(const ivs_sampleset* set);
size_t ivs_sampleset_constraint_count(const ivs_sampleset* set);
long ivs_sampleset_total_grad_evals(const ivs_sampleset* set);
long ivs_sampleset_walk_steps(const ivs_sampleset* set);
/* code (code_dim), activations (constraint count), step_index: any may
 * be NULL. */
ivs_status ivs_sampleset_get(const ivs_sampleset* set, size_t index,
                             double* code, double* activations,
                             int* step_index);
void ivs_sampleset_free(ivs_sampleset* set);

/* ---- experiment pipeline --------------------------------------------- */

/* Runs a config file end to end and writes the artifacts; see the CLI
 * documentation for the config grammar and produced files. */
ivs_status ivs_run_experiment(const char* config_path, int verbose);
ivs_status ivs_emit_plot(const char* run_dir, const char* out_svg_path);
/* report receives a malloc'd JSON document; release with
 * ivs_string_free. */
ivs_status ivs_compare_runs(const char* const* run_dirs, size_t count,
                            char** report);
void ivs_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* INVERSESET_H */
